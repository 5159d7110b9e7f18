"""Command-line front end: ``wrobust sweep | verify | protocol``."""

import argparse
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path

from . import measures, protocols, reduction, verification
from .channels import apply_all, make_channel, perturbed_amplitude_damping
from .linalg import projector
from .states import WLikeSpec, ghz, w_asymmetric, w_like

EXIT_OK, EXIT_VERIFY, EXIT_ARGS = 0, 1, 2

SWEEP_HEADER = ("p", "n", "k", "route", "measure", "value")
PROTOCOL_HEADER = ("p", "simulated_fidelity", "closed_form_fidelity", "bound", "classical_threshold")
ROUTES = ("closed", "reduced", "brute")

# (state, measure) -> routes that can evaluate it
SUPPORT = {
    ("w", "negativity"): ("closed", "reduced", "brute"),
    ("w", "concurrence"): ("closed", "reduced", "brute"),
    ("w", "mw"): ("closed", "brute"),
    ("w", "genconc"): ("closed", "reduced"),
    ("wlike", "negativity"): ("brute",),
    ("wlike", "mw"): ("closed", "brute"),
    ("ghz", "negativity"): ("brute",),
    ("ghz", "mw"): ("brute",),
    ("wa", "negativity"): ("brute",),
    ("wa", "mw"): ("brute",),
}
CUT_MEASURES = ("negativity", "concurrence")


class UsageError(Exception):
    """Bad arguments; reported with exit code 2."""


@dataclass(frozen=True)
class SweepConfig:
    state: str
    channel: str
    measure: str
    ns: tuple[int, ...]
    ks: tuple[int, ...]
    ps: tuple[float, ...]
    routes: tuple[str, ...]
    ratio: bool = False
    spec: WLikeSpec | None = None


def p_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive grid start, start+step, ... <= stop, rounded to 12 digits."""
    if step <= 0:
        raise UsageError("--p-step must be positive")
    if stop < start:
        raise UsageError("empty p grid: --p-stop is below --p-start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = tuple(round(start + i * step, 12) for i in range(count))
    if grid[0] < 0 or grid[-1] > 1:
        raise UsageError("p grid must lie within [0, 1]")
    return grid


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _flatten(value) -> list:
    if value is None:
        return []
    out = []
    for v in value:
        out.extend(v if isinstance(v, list) else [v])
    return out


def _state_vector(cfg: SweepConfig, n: int):
    if cfg.state == "ghz":
        return ghz(n)
    if cfg.state == "wa":
        return w_asymmetric(n - 1, w_on=1)
    return w_like(_spec_for(cfg, n))


def _spec_for(cfg: SweepConfig, n: int) -> WLikeSpec:
    if cfg.spec is not None:
        return cfg.spec
    return WLikeSpec.uniform(n)


def evaluate(cfg: SweepConfig, route: str, n: int, k: int, p: float) -> float:
    """Value of one sweep point."""
    m, ch = cfg.measure, cfg.channel
    if cfg.state == "w" and m in CUT_MEASURES:
        fn = {"closed": reduction.closed_form, "reduced": reduction.reduced_model, "brute": reduction.brute_force}[route]
        return fn(ch, m, p, n, k)
    if m == "genconc":
        return reduction.generalized_concurrence_decayed(n, p, ch, route=route)
    if m == "mw" and route == "closed":
        return reduction.mw_closed(_spec_for(cfg, n), p, ch)
    rho = apply_all(make_channel(ch, p), projector(_state_vector(cfg, n)))
    if m == "mw":
        return measures.global_tangle_sum(rho)
    return measures.negativity(rho, measures.Bipartition.first(k, n))


def _task(args):
    cfg, route, n, k, p = args
    return evaluate(cfg, route, n, k, p)


def _validate(cfg: SweepConfig) -> None:
    supported = SUPPORT.get((cfg.state, cfg.measure))
    if supported is None:
        raise UsageError(f"measure {cfg.measure!r} is not available for state {cfg.state!r}")
    bad = [r for r in cfg.routes if r not in supported]
    if bad:
        raise UsageError(f"route(s) {bad} not available for {cfg.state}/{cfg.measure}; use one of {list(supported)}")
    if not cfg.ns:
        raise UsageError("no system sizes given (--n)")
    if not cfg.ps:
        raise UsageError("empty p grid")
    for n in cfg.ns:
        if n < 2:
            raise UsageError(f"n must be at least 2, got {n}")
        if cfg.state == "wa" and n < 3:
            raise UsageError("the asymmetric W state needs n >= 3")
        if "brute" in cfg.routes and n > reduction.BRUTE_MAX_N:
            raise UsageError(f"brute-force route refuses n={n} > {reduction.BRUTE_MAX_N}")
        if cfg.measure == "genconc" and "reduced" in cfg.routes and n > reduction.GCONC_SUBSET_MAX_N:
            raise UsageError(f"reduced genconc route refuses n={n} > {reduction.GCONC_SUBSET_MAX_N}")
        if cfg.measure in CUT_MEASURES:
            for k in cfg.ks:
                if not 1 <= k < n:
                    raise UsageError(f"cut k={k} invalid for n={n}")
    if cfg.spec is not None and any(n != cfg.spec.n for n in cfg.ns):
        raise UsageError(f"--coeffs defines n={cfg.spec.n}, which conflicts with --n")


def sweep_rows(cfg: SweepConfig, workers: int = 1) -> list[tuple]:
    """All (p, n, k, route, measure, value) rows, sorted by (n, k, p)."""
    _validate(cfg)
    ks = cfg.ks if cfg.measure in CUT_MEASURES else (0,)
    ps = sorted(set(cfg.ps) | ({0.0} if cfg.ratio else set()))
    points = [(cfg, r, n, k, p) for n in sorted(set(cfg.ns)) for k in sorted(set(ks)) for p in ps for r in cfg.routes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_task, points, chunksize=8))
    else:
        values = [_task(pt) for pt in points]
    table = {(n, k, p, r): v for (_, r, n, k, p), v in zip(points, values)}
    label = cfg.measure + ("_ratio" if cfg.ratio else "")
    rows = []
    for (n, k, p, r), v in table.items():
        if p not in cfg.ps:
            continue
        if cfg.ratio:
            base = table[n, k, 0.0, r]
            v = v / base if base != 0 else math.nan
        rows.append((p, n, k, r, label, v))
    order = {r: i for i, r in enumerate(ROUTES)}
    rows.sort(key=lambda row: (row[1], row[2], row[0], order[row[3]]))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from None


def protocol_rows(resource: str, stage: str, channel: str, n_bobs: int, ps, receiver: int = 1) -> list[tuple]:
    """Rows of the protocol CSV. Simulation columns are blank beyond the simulator's size limit."""
    label = make_channel(channel, 0).label
    simulate = n_bobs + 1 <= protocols.MAX_RESOURCE_QUBITS
    if not 1 <= receiver <= n_bobs:
        raise UsageError(f"receiver must be in 1..{n_bobs}")
    rows = []
    for p in ps:
        closed = protocols.f_closed(resource, stage, p, n_bobs) if label == "amplitude_damping" else None
        sim = bound = None
        if simulate:
            run = protocols.ProtocolRun(resource, n_bobs, p, label, stage)
            sim = protocols.avg_fidelity(run, receiver=receiver)
            bound = protocols.fmax_bound(protocols.resource_negativity(run))
        rows.append((p, sim, closed, bound, protocols.CLASSICAL_FIDELITY))
    return rows


def read_config(path: str) -> dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment; keys may use - or _."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_grid(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p-start", type=float, default=0.0)
    sp.add_argument("--p-stop", type=float, default=1.0)
    sp.add_argument("--p-step", type=float, default=0.02)
    sp.add_argument("--channel", default="ad", choices=["ad", "dephasing", "amplitude_damping"])
    sp.add_argument("--out", help="output CSV path (default: stdout)")
    sp.add_argument("--config", help="key=value file; command-line flags take precedence")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="wrobust", description="Decoherence of W-type entanglement: sweeps, checks, protocols.")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="entanglement versus noise strength, as CSV")
    sw.add_argument("--state", default="w", choices=["ghz", "w", "wlike", "wa"])
    sw.add_argument("--measure", default="negativity", choices=["negativity", "concurrence", "mw", "genconc"])
    sw.add_argument("--n", type=_int_list, nargs="+", default=[[3]], help="system sizes, e.g. --n 2 20 50 or --n 2,20")
    sw.add_argument("--k", type=_int_list, nargs="+", default=[[1]], help="cut sizes for negativity/concurrence")
    sw.add_argument("--route", default="closed", choices=[*ROUTES, "all"])
    sw.add_argument("--ratio", action="store_true", help="divide each value by its p=0 value")
    sw.add_argument("--coeffs", type=_float_list, help="real W-like coefficients a_1..a_n (normalized)")
    sw.add_argument("--alpha", type=float, default=1.0)
    sw.add_argument("--beta", type=float, default=0.0)
    sw.add_argument("--workers", type=int, default=1)
    _add_grid(sw)

    ve = sub.add_parser("verify", help="run the invariant suites")
    ve.add_argument("--level", default="fast", choices=["fast", "full"])
    ve.add_argument("--config", help="key=value file; command-line flags take precedence")
    ve.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    pr = sub.add_parser("protocol", help="average fidelity of teleportation or splitting, as CSV")
    pr.add_argument("--resource", default="wa", choices=["ghz", "wa"])
    pr.add_argument("--stage", default="teleport", choices=["teleport", "split"])
    pr.add_argument("--n", type=int, default=3, help="number of Bobs")
    pr.add_argument("--receiver", type=int, default=1)
    _add_grid(pr)
    return parser, {"sweep": sw, "verify": ve, "protocol": pr}


def parse_args(argv) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sp = subs[args.command]
        known = {a.dest for a in sp._actions}
        cfg = read_config(args.config)
        unknown = sorted(set(cfg) - known - {"config"})
        if unknown:
            raise UsageError(f"unknown config keys: {unknown}")
        flags = {"ratio", "inject_fault"}
        for key in flags & set(cfg):
            if cfg[key].lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key} expects a boolean")
            cfg[key] = cfg[key].lower() in ("true", "1", "yes")
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def _sweep_config(args) -> SweepConfig:
    spec = None
    if args.coeffs:
        try:
            spec = WLikeSpec(tuple(args.coeffs), args.alpha, args.beta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif args.state == "wlike" and (args.alpha, args.beta) != (1.0, 0.0):
        raise UsageError("--alpha/--beta need --coeffs")
    if args.state != "wlike" and spec is not None:
        raise UsageError("--coeffs only applies to --state wlike")
    routes = SUPPORT.get((args.state, args.measure), ROUTES) if args.route == "all" else (args.route,)
    return SweepConfig(
        state=args.state,
        channel=make_channel(args.channel, 0).label,
        measure=args.measure,
        ns=tuple(_flatten(args.n)),
        ks=tuple(_flatten(args.k)),
        ps=p_grid(args.p_start, args.p_stop, args.p_step),
        routes=tuple(routes),
        ratio=args.ratio,
        spec=spec,
    )


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    try:
        rows = sweep_rows(cfg, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(to_csv(SWEEP_HEADER, rows), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    ctx = perturbed_amplitude_damping() if args.inject_fault else nullcontext()
    with ctx:
        results = verification.run_suite(args.level)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.informational and not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks ok, {len(failed)} failed")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_protocol(args) -> int:
    ps = p_grid(args.p_start, args.p_stop, args.p_step)
    if args.n < 2:
        raise UsageError("--n (number of Bobs) must be at least 2")
    rows = protocol_rows(args.resource, args.stage, args.channel, args.n, ps, args.receiver)
    _emit(to_csv(PROTOCOL_HEADER, rows), args.out)
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "verify": cmd_verify, "protocol": cmd_protocol}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"wrobust: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except SystemExit as exc:
        # argparse exits with 2 on bad flags and 0 on --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
