"""Boundary-qubit reduction for W states and the closed-form decay laws.

For a cut {1..k}:{k+1..n} of |W_n>, every preparation gate except the one
joining qubits k and k+1 is local to one side. Undoing those local gates maps
the decohered state to a two-qubit problem on the boundary pair, so any
entanglement monotone can be evaluated there instead of on 2^n dimensions.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from . import measures
from .channels import apply_all, make_channel
from .linalg import partial_trace, permute_qubits, projector
from .measures import Bipartition, concurrence_mixed_2q, concurrence_pure, negativity
from .states import WLikeSpec, crosses, steps_unitary, w, w_decomposition, w_like, zeros

AGREEMENT_TOL = 1e-8
BRUTE_MAX_N = 10
GCONC_SUBSET_MAX_N = 16

Measure = Literal["negativity", "concurrence"]


@dataclass(frozen=True)
class CutSpec:
    """Bipartition {k}:{n-k} of a permutation-symmetric n-qubit state."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 2 or not 1 <= self.k <= self.n - 1:
            raise ValueError(f"invalid cut k={self.k} for n={self.n}")

    @property
    def bipartition(self) -> Bipartition:
        return Bipartition.first(self.k, self.n)


def w2_state(cut: CutSpec) -> np.ndarray:
    """sqrt((n-k)/n)|01> + sqrt(k/n)|10>."""
    n, k = cut.n, cut.k
    return np.array([0, np.sqrt((n - k) / n), np.sqrt(k / n), 0], dtype=complex)


def reduced_model_ad(cut: CutSpec, p: float) -> np.ndarray:
    """Two-qubit state p|00><00| + (1-p)|W2(k)><W2(k)|."""
    rho = (1 - p) * projector(w2_state(cut))
    rho[0, 0] += p
    return rho


def _pure_measure(psi: np.ndarray, cut: Bipartition, measure: str) -> float:
    if measure == "negativity":
        return negativity(psi, cut)
    if measure == "concurrence":
        return concurrence_pure(psi, cut)
    raise ValueError(f"unknown measure {measure!r}")


def reduced_entanglement_dephasing(cut: CutSpec, p: float, measure: Measure) -> float:
    """(1-p)^2 times the measure of the pure boundary state |W2(k)>."""
    return (1 - p) ** 2 * _pure_measure(w2_state(cut), Bipartition({1}, 2), measure)


def neg_dephasing(p: float, n: int, k: int) -> float:
    return (1 - p) ** 2 * math.sqrt(k * (n - k)) / n


def neg_ad(p: float, n: int, k: int) -> float:
    return -p / 2 + math.sqrt(n**2 * p**2 + 4 * k * (n - k) * (1 - p) ** 2) / (2 * n)


def conc_dephasing(p: float, n: int, k: int) -> float:
    return 2 * (1 - p) ** 2 * math.sqrt(k * (n - k)) / n


def conc_ad(p: float, n: int, k: int) -> float:
    return 2 * (1 - p) * math.sqrt(k * (n - k)) / n


def epsilon_ad(p: float, n: int, k: int) -> float:
    """Negativity ratio N_AD(p) / N_AD(0) for the {k}:{n-k} cut."""
    s = k * (n - k)
    return (-n * p + math.sqrt(n**2 * p**2 + 4 * s * (1 - p) ** 2)) / (2 * math.sqrt(s))


def decay_factors(p: float, n: int, k: int) -> dict[str, float]:
    CutSpec(n, k)
    return {
        "epsilon_D": (1 - p) ** 2,
        "delta_D": (1 - p) ** 2,
        "delta_AD": 1 - p,
        "epsilon_AD": epsilon_ad(p, n, k),
    }


CLOSED_FORMS: dict[tuple[str, str], Callable[[float, int, int], float]] = {
    ("amplitude_damping", "negativity"): neg_ad,
    ("amplitude_damping", "concurrence"): conc_ad,
    ("dephasing", "negativity"): neg_dephasing,
    ("dephasing", "concurrence"): conc_dephasing,
}


def closed_form(channel: str, measure: str, p: float, n: int, k: int) -> float:
    ch = make_channel(channel, 0).label
    try:
        return CLOSED_FORMS[ch, measure](p, n, k)
    except KeyError:
        raise ValueError(f"no closed form for {measure!r} under {ch!r}") from None


def mw_initial(spec: WLikeSpec) -> float:
    """(8 |alpha|^4 / N) sum_{i<j} |a_i a_j|^2."""
    a2 = np.abs(np.asarray(spec.coeffs)) ** 2
    pair_sum = (a2.sum() ** 2 - (a2**2).sum()) / 2
    return float(8 * abs(spec.alpha) ** 4 * pair_sum / spec.n)


def mw_closed(spec: WLikeSpec, p: float, channel: str) -> float:
    label = make_channel(channel, 0).label
    power = {"amplitude_damping": 2, "dephasing": 4}[label]
    return (1 - p) ** power * mw_initial(spec)


# --- the local frame where only the boundary gate remains -------------------


def local_frame_unitary(cut: CutSpec) -> np.ndarray:
    """Product of the preparation gates that act inside one side of the cut."""
    steps = [s for s in w_decomposition(cut.n, cut.k) if not crosses(s, cut.k)]
    return steps_unitary(steps, cut.n)


def to_boundary_frame(rho: np.ndarray, cut: CutSpec) -> np.ndarray:
    """Undo the side-local gates: V^dagger rho V. Preserves every entanglement monotone for the cut."""
    v = local_frame_unitary(cut)
    return v.conj().T @ rho @ v


def split_boundary(rho: np.ndarray, cut: CutSpec) -> tuple[np.ndarray, float]:
    """Factor a boundary-frame state as rho_pair x |0..0><0..0|.

    Returns the two-qubit state on qubits (k, k+1) and the max deviation of
    ``rho`` from that product form.
    """
    n, k = cut.n, cut.k
    order = [k, k + 1] + [q for q in range(1, n + 1) if q not in (k, k + 1)]
    moved = permute_qubits(rho, order, n)
    pair = partial_trace(rho, [k, k + 1], n)
    rebuilt = np.kron(pair, projector(zeros(n - 2))) if n > 2 else pair
    return pair, float(np.max(np.abs(moved - rebuilt)))


def povm_elements(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Two-outcome measurement on m qubits: A1 projects on one excitation, A2 = I - A1."""
    a1 = np.zeros((2**m, 2**m), dtype=complex)
    for i in range(m):
        a1[1 << i, 1 << i] = 1
    return a1, np.eye(2**m) - a1


def evolved_w(n: int, p: float, channel: str) -> np.ndarray:
    if n > BRUTE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_MAX_N}, got {n}")
    return apply_all(make_channel(channel, p), projector(w(n)))


def evolved_w_like(spec: WLikeSpec, p: float, channel: str) -> np.ndarray:
    if spec.n > BRUTE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_MAX_N}, got {spec.n}")
    return apply_all(make_channel(channel, p), projector(w_like(spec)))


def _brute_concurrence_ad(rho: np.ndarray, cut: CutSpec) -> tuple[float, float]:
    pair, residual = split_boundary(to_boundary_frame(rho, cut), cut)
    return concurrence_mixed_2q(pair), residual


def _brute_concurrence_dephasing(rho: np.ndarray, cut: CutSpec) -> tuple[float, float]:
    """Replay the two-sided bound on the full dephased state.

    Lower bound: a separable POVM on the non-boundary qubits (in the boundary
    frame) and the concurrence of the surviving branch. Upper bound: convexity
    over rho = (separable diagonal part) + t |W_n><W_n|, with t read off the
    state's single-excitation coherence. Returns the lower bound and the gap.
    """
    n, k = cut.n, cut.k
    framed = to_boundary_frame(rho, cut)
    if n > 2:
        order = [k, k + 1] + [q for q in range(1, n + 1) if q not in (k, k + 1)]
        moved = permute_qubits(framed, order, n)
        _, a2 = povm_elements(n - 2)
        op = np.kron(np.eye(4), a2)
        branch = op @ moved @ op.conj().T
        pair = partial_trace(branch, [1, 2], n)
        residual = np.max(np.abs(branch - np.kron(pair, projector(zeros(n - 2)))))
        if residual > AGREEMENT_TOL:
            raise CrossCheckError(f"POVM branch is not boundary x vacuum (residual {residual:.2e})")
        prob = np.trace(pair).real
        lower = prob * concurrence_mixed_2q(pair / prob) if prob > 0 else 0.0
    else:
        lower = concurrence_mixed_2q(framed)
    # upper bound
    t = n * rho[1 << (n - 1), 1 << (n - 2)].real
    rest = rho - t * projector(w(n))
    if np.max(np.abs(rest - np.diag(np.diag(rest)))) > AGREEMENT_TOL or np.min(np.diag(rest).real) < -AGREEMENT_TOL:
        raise CrossCheckError("dephased state does not split as diagonal + W component")
    upper = t * concurrence_pure(w(n), cut.bipartition)
    return lower, abs(upper - lower)


def brute_force(channel: str, measure: Measure, p: float, n: int, k: int) -> float:
    """Entanglement of the full decohered W state across the {k}:{n-k} cut."""
    cut = CutSpec(n, k)
    label = make_channel(channel, 0).label
    rho = evolved_w(n, p, label)
    if measure == "negativity":
        return negativity(rho, cut.bipartition)
    if measure != "concurrence":
        raise ValueError(f"unknown measure {measure!r}")
    if label == "amplitude_damping":
        value, gap = _brute_concurrence_ad(rho, cut)
    else:
        value, gap = _brute_concurrence_dephasing(rho, cut)
    if gap > AGREEMENT_TOL:
        raise CrossCheckError(f"boundary reduction residual {gap:.3e} exceeds tolerance")
    return value


def reduced_model(channel: str, measure: Measure, p: float, n: int, k: int) -> float:
    cut = CutSpec(n, k)
    label = make_channel(channel, 0).label
    if label == "dephasing":
        return reduced_entanglement_dephasing(cut, p, measure)
    rho2 = reduced_model_ad(cut, p)
    if measure == "negativity":
        return negativity(rho2, Bipartition({1}, 2))
    if measure == "concurrence":
        return concurrence_mixed_2q(rho2)
    raise ValueError(f"unknown measure {measure!r}")


class CrossCheckError(AssertionError):
    pass


@dataclass
class CrossCheckReport:
    n: int
    k: int
    p: float
    channel: str
    measure: str
    closed_form: float
    reduced_model: float
    brute_force: float
    max_abs_error: float
    timings: dict[str, float] = field(default_factory=dict)


def cross_check(n: int, k: int, p: float, channel: str, measure: Measure, tol: float = AGREEMENT_TOL) -> CrossCheckReport:
    """Evaluate one point by all three routes; raise ``CrossCheckError`` on disagreement."""
    if n > BRUTE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_MAX_N}, got {n}")
    values, timings = {}, {}
    for name, fn in (("closed", closed_form), ("reduced", reduced_model), ("brute", brute_force)):
        t0 = time.perf_counter()
        values[name] = fn(channel, measure, p, n, k)
        timings[name] = time.perf_counter() - t0
    v = list(values.values())
    err = max(v) - min(v)
    report = CrossCheckReport(
        n, k, p, make_channel(channel, 0).label, measure,
        values["closed"], values["reduced"], values["brute"], err, timings,
    )
    if err > tol:
        raise CrossCheckError(f"routes disagree by {err:.3e}: {report}")
    return report


def generalized_concurrence_decayed(n: int, p: float, channel: str, route: str = "reduced") -> float:
    """Generalized concurrence of the decohered W state via the sum over bipartitions.

    Each bipartition contributes C_alpha^2 / 2, the bipartite concurrence
    taken from the two-qubit boundary model (``route='reduced'``, one term per
    subset) or from the closed forms (``route='closed'``, grouped by subset
    size, so large n is cheap).
    """
    if route == "reduced":
        if n > GCONC_SUBSET_MAX_N:
            raise ValueError(f"subset sum limited to n <= {GCONC_SUBSET_MAX_N}")
        total = sum(reduced_model(channel, "concurrence", p, n, len(sub)) ** 2 / 2 for sub in measures.subset_masks(n))
    elif route == "closed":
        total = sum(math.comb(n, k) * closed_form(channel, "concurrence", p, n, k) ** 2 / 2 for k in range(1, n))
    else:
        raise ValueError(f"unknown route {route!r}")
    return float(2 ** (1 - n / 2) * math.sqrt(total))
