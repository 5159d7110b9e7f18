"""Invariant suites behind ``wrobust verify``."""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from . import measures, protocols, reduction
from .channels import amplitude_damping, apply_all, apply_on_qubit, dephasing, make_channel
from .linalg import herm_eigenvalues, projector
from .measures import Bipartition
from .states import WLikeSpec, decode_unitary, steps_unitary, w, w_decomposition, w_like, excitation, zeros

P_GRID = [round(0.1 * i, 10) for i in range(11)]


@dataclass
class CheckResult:
    name: str
    max_error: float
    tol: float
    informational: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tol)

    def line(self) -> str:
        if self.informational:
            tag = "INFO"
        else:
            tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<58s} max_err={self.max_error:.3e} tol={self.tol:.0e}"


def _random_density(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _kraus_completeness() -> float:
    err = 0.0
    for make in (dephasing, amplitude_damping):
        for p in P_GRID:
            ops = make_channel(make(p).label, p).kraus_ops
            err = max(err, np.max(np.abs(sum(k.conj().T @ k for k in ops) - np.eye(2))))
    return err


def _channel_action() -> float:
    """Single-qubit action on |+> and |1>: coherence factors and population transfer."""
    plus = projector(np.array([1, 1]) / math.sqrt(2))
    one = np.diag([0.0, 1.0]).astype(complex)
    err = 0.0
    for p in P_GRID:
        d = apply_on_qubit(make_channel("dephasing", p), plus, 1)
        err = max(err, abs(d[0, 1] - 0.5 * (1 - p)), abs(d[0, 0] - 0.5))
        a = apply_on_qubit(make_channel("amplitude_damping", p), plus, 1)
        err = max(err, abs(a[0, 1] - 0.5 * math.sqrt(1 - p)))
        b = apply_on_qubit(make_channel("amplitude_damping", p), one, 1)
        err = max(err, abs(b[1, 1] - (1 - p)), abs(b[0, 0] - p))
    return err


def _trace_and_positivity(rng) -> float:
    err = 0.0
    for label in ("dephasing", "amplitude_damping"):
        for p in (0.2, 0.7):
            out = apply_all(make_channel(label, p), _random_density(3, rng))
            err = max(err, abs(np.trace(out).real - 1), max(0.0, -herm_eigenvalues(out)[0]))
    return err


def _ad_semigroup(rng) -> float:
    rho = _random_density(2, rng)
    p1, p2 = 0.3, 0.45
    two = apply_all(make_channel("ad", p2), apply_all(make_channel("ad", p1), rho))
    one = apply_all(make_channel("ad", 1 - (1 - p1) * (1 - p2)), rho)
    return float(np.max(np.abs(two - one)))


def _ad_on_w(nmax: int) -> float:
    err = 0.0
    for n in range(2, nmax + 1):
        for p in (0.25, 0.6):
            got = apply_all(make_channel("ad", p), projector(w(n)))
            want = (1 - p) * projector(w(n)) + p * projector(zeros(n))
            err = max(err, np.max(np.abs(got - want)))
    return err


def _decomposition(nmax: int) -> float:
    err = 0.0
    for n in range(2, nmax + 1):
        for k in range(1, n):
            u = steps_unitary(w_decomposition(n, k), n)
            err = max(err, np.max(np.abs(projector(u @ excitation(n, k)) - projector(w(n)))))
        d = decode_unitary(n)
        err = max(err, np.max(np.abs(projector(d @ w(n)) - projector(excitation(n, 1)))))
        err = max(err, np.max(np.abs(projector(d @ zeros(n)) - projector(zeros(n)))))
    return err


def _reduction_negativity(label: str, nmax: int) -> float:
    err = 0.0
    for n in range(3, nmax + 1):
        for p in P_GRID:
            rho = reduction.evolved_w(n, p, label)
            for k in range(1, n):
                full = measures.negativity(rho, Bipartition.first(k, n))
                model = reduction.reduced_model(label, "negativity", p, n, k)
                err = max(err, abs(full - model))
    return err


def _closed_vs_brute(label: str, measure: str, nmax: int) -> float:
    err = 0.0
    for n in range(2, nmax + 1):
        for k in range(1, n):
            for p in P_GRID:
                closed = reduction.closed_form(label, measure, p, n, k)
                brute = reduction.brute_force(label, measure, p, n, k)
                err = max(err, abs(closed - brute))
    return err


def _mw_forms(rng, count: int, nmax: int) -> float:
    err = 0.0
    for _ in range(count):
        n = int(rng.integers(2, nmax + 1))
        psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        psi /= np.linalg.norm(psi)
        err = max(err, abs(measures.mw_pure(psi) - measures.mw_operational(psi)))
    return err


def _mw_identity(rng, count: int, nmax: int) -> float:
    err = 0.0
    for _ in range(count):
        spec = WLikeSpec.random(int(rng.integers(2, nmax + 1)), rng)
        psi = w_like(spec)
        vals = (
            measures.mw_pure(psi),
            measures.mw_operational(psi),
            measures.global_tangle_sum(projector(psi)),
            reduction.mw_initial(spec),
        )
        err = max(err, max(vals) - min(vals))
    return err


def _pair_concurrence(rng, count: int, nmax: int) -> float:
    err = 0.0
    for _ in range(count):
        spec = WLikeSpec.random(int(rng.integers(3, nmax + 1)), rng)
        rho = projector(w_like(spec))
        for i, j in combinations(range(1, spec.n + 1), 2):
            c = measures.concurrence_mixed_2q(measures.reduced(rho, [i, j], spec.n))
            err = max(err, abs(c - 2 * abs(spec.alpha) ** 2 * abs(spec.coeffs[i - 1] * spec.coeffs[j - 1])))
    return err


def _mw_decay(label: str, rng, seeds: int, nmax: int) -> float:
    err = 0.0
    for _ in range(seeds):
        spec = WLikeSpec.random(int(rng.integers(2, nmax + 1)), rng)
        for p in (0.2, 0.5, 0.9):
            brute = measures.global_tangle_sum(reduction.evolved_w_like(spec, p, label))
            err = max(err, abs(brute - reduction.mw_closed(spec, p, label)))
    return err


def _gconc_w3() -> float:
    return abs(measures.generalized_concurrence_pure(w(3)) - 2 / math.sqrt(3))


def _gconc_decay(nmax: int) -> float:
    err = 0.0
    for n in range(2, nmax + 1):
        g0 = measures.generalized_concurrence_pure(w(n))
        for label in ("amplitude_damping", "dephasing"):
            for p in P_GRID:
                delta = reduction.decay_factors(p, n, 1)["delta_AD" if label == "amplitude_damping" else "delta_D"]
                got = reduction.generalized_concurrence_decayed(n, p, label, route="reduced")
                err = max(err, abs(got - delta * g0))
    return err


def _scaling_law() -> float:
    a = reduction.epsilon_ad(0.5, 100, 1) * math.sqrt(100)
    b = reduction.epsilon_ad(0.5, 400, 1) * math.sqrt(400)
    return abs(a - b) / b


def _protocol(resource: str, stage: str, nmax: int) -> float:
    err = 0.0
    for nb in range(2, nmax + 1):
        for p in P_GRID:
            run = protocols.ProtocolRun(resource, nb, p, "amplitude_damping", stage)
            err = max(err, abs(protocols.avg_fidelity(run) - protocols.f_closed(resource, stage, p, nb)))
    return err


def _saturation(nmax: int) -> float:
    err = 0.0
    for nb in range(2, nmax + 1):
        for p in P_GRID:
            run = protocols.ProtocolRun("wa", nb, p, "amplitude_damping", "teleport")
            bound = protocols.fmax_bound(protocols.resource_negativity(run))
            err = max(err, abs(bound - protocols.avg_fidelity(run)))
    return err


def suite(level: str = "fast", seed: int = 20240601) -> list[tuple[str, Callable[[], float], float, bool]]:
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    nmax = 5 if level == "fast" else 8
    rng = np.random.default_rng(seed)
    checks = [
        ("channels: Kraus completeness", _kraus_completeness, 1e-12),
        ("channels: single-qubit action (coherence/population)", _channel_action, 1e-12),
        ("channels: trace preservation and positivity", lambda: _trace_and_positivity(rng), 1e-9),
        ("channels: AD semigroup", lambda: _ad_semigroup(rng), 1e-10),
        (f"channels: AD on W_n is p|0><0| + (1-p)|W><W| (n<={nmax})", lambda: _ad_on_w(nmax), 1e-10),
        (f"states: W decomposition for every cut (n<={nmax})", lambda: _decomposition(nmax), 1e-10),
    ]
    for label in ("amplitude_damping", "dephasing"):
        checks.append((f"reduction: full vs boundary negativity, {label}", lambda l=label: _reduction_negativity(l, nmax), 1e-9))
    for label in ("amplitude_damping", "dephasing"):
        for m in ("negativity", "concurrence"):
            checks.append((f"closed form vs brute force: {m}, {label}", lambda l=label, m=m: _closed_vs_brute(l, m, nmax), 1e-8))
    checks += [
        ("measures: MW reduced-purity vs operational form", lambda: _mw_forms(rng, 50, min(nmax, 6)), 1e-10),
        ("measures: MW = (2/N) sum of 2-tangles on W-like states", lambda: _mw_identity(rng, 50, min(nmax, 6)), 1e-9),
        ("measures: pair concurrence 2|alpha|^2|a_i a_j|", lambda: _pair_concurrence(rng, 10, min(nmax, 6)), 1e-10),
        ("measures: generalized concurrence of W_3", _gconc_w3, 1e-10),
    ]
    for label in ("amplitude_damping", "dephasing"):
        checks.append((f"MW decay law, {label}", lambda l=label: _mw_decay(l, rng, 10, min(nmax, 6)), 1e-8))
    checks += [
        ("generalized concurrence decays by delta", lambda: _gconc_decay(min(nmax, 6)), 1e-9),
        ("AD negativity decay scales as 1/sqrt(N) (N=100 vs 400)", _scaling_law, 0.03),
    ]
    checks = [(name, fn, tol, False) for name, fn, tol in checks]
    if level == "full":
        nb = 5
        checks += [
            ("protocol: GHZ teleport fidelity vs closed form", lambda: _protocol("ghz", "teleport", nb), 1e-9, False),
            ("protocol: W_A teleport fidelity vs closed form", lambda: _protocol("wa", "teleport", nb), 1e-9, False),
            ("protocol: GHZ split fidelity vs closed form", lambda: _protocol("ghz", "split", nb), 1e-9, False),
            ("protocol: W_A teleport saturates negativity bound", lambda: _saturation(nb), 1e-8, False),
            ("protocol: W_A split equals W_A teleport", lambda: _wa_split_vs_teleport(nb), 1e-9, False),
            ("protocol: W_A split vs 1 - p/3 (known mismatch)", lambda: _protocol("wa", "split", nb), 1e-9, True),
        ]
    return checks


def _wa_split_vs_teleport(nmax: int) -> float:
    err = 0.0
    for nb in range(2, nmax + 1):
        for p in P_GRID:
            split = protocols.avg_fidelity(protocols.ProtocolRun("wa", nb, p, "ad", "split"))
            err = max(err, abs(split - protocols.f_closed("wa", "teleport", p, nb)))
    return err


def run_suite(level: str = "fast", seed: int = 20240601) -> list[CheckResult]:
    results = []
    for name, fn, tol, info in suite(level, seed):
        try:
            err = float(fn())
        except (ValueError, AssertionError) as exc:
            name = f"{name} [{type(exc).__name__}: {exc}]"
            err = math.inf
        results.append(CheckResult(name, err, tol, info))
    return results
