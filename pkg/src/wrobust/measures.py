"""Entanglement quantifiers: negativity, concurrence, linear entropies, MW and friends."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .linalg import Y, herm_eig, herm_eigenvalues, kron, n_qubits_of, partial_trace, partial_transpose, projector

CLAMP_TOL = 1e-9
RANK_TOL = 1e-12

_YY = kron(Y, Y)


@dataclass(frozen=True)
class Bipartition:
    """Cut between the qubits in ``side_a`` and the rest of an n-qubit register."""

    side_a: frozenset
    n_qubits: int

    def __init__(self, side_a, n_qubits: int):
        side = frozenset(int(q) for q in side_a)
        if not side:
            raise ValueError("side A must be nonempty")
        if not side < frozenset(range(1, n_qubits + 1)):
            raise ValueError(f"side A {sorted(side)} is not a proper subset of 1..{n_qubits}")
        object.__setattr__(self, "side_a", side)
        object.__setattr__(self, "n_qubits", n_qubits)

    @classmethod
    def first(cls, k: int, n: int) -> "Bipartition":
        """The cut {1..k}:{k+1..n}."""
        return cls(range(1, k + 1), n)

    @property
    def side_b(self) -> frozenset:
        return frozenset(range(1, self.n_qubits + 1)) - self.side_a

    def swapped(self) -> "Bipartition":
        return Bipartition(self.side_b, self.n_qubits)


def clamp(value: float) -> float:
    """Snap tiny negative/positive round-off around zero to exactly 0."""
    return 0.0 if abs(value) <= CLAMP_TOL else float(value)


def _as_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return projector(state) if state.ndim == 1 else state


def _n(state: np.ndarray) -> int:
    return n_qubits_of(_as_density(state)) if state.ndim == 2 else int(state.size).bit_length() - 1


def reduced(state: np.ndarray, keep, n: int | None = None) -> np.ndarray:
    """Reduced density matrix on ``keep`` from a pure vector or density matrix."""
    state = np.asarray(state, dtype=complex)
    if n is None:
        n = _n(state)
    keep = sorted(keep)
    if state.ndim == 1:
        kept = [q - 1 for q in keep]
        rest = [q for q in range(n) if q not in kept]
        m = state.reshape((2,) * n).transpose(kept + rest).reshape(2 ** len(kept), -1)
        return m @ m.conj().T
    return partial_trace(state, keep, n)


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.vdot(rho, rho)))


def negativity(rho: np.ndarray, cut: Bipartition) -> float:
    """(||rho^{T_A}||_1 - 1) / 2."""
    rho = _as_density(rho)
    ev = herm_eigenvalues(partial_transpose(rho, cut.side_a, cut.n_qubits))
    return clamp((np.sum(np.abs(ev)) - np.real(np.trace(rho))) / 2)


def linear_entropy(rho: np.ndarray) -> float:
    return clamp(1.0 - purity(_as_density(rho)))


def concurrence_pure(psi: np.ndarray, cut: Bipartition) -> float:
    """sqrt(2 (1 - tr rho_A^2)) for a pure state."""
    rho_a = reduced(psi, cut.side_a, cut.n_qubits)
    return float(np.sqrt(max(0.0, 2 * (1 - purity(rho_a)))))


def concurrence_mixed_2q(rho: np.ndarray) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4) of a two-qubit state.

    The l_i are the singular values of T = A^T (Y x Y) A, where rho = A A^dagger
    comes from the eigendecomposition. This equals the usual square roots of
    the spectrum of rho rho~ but avoids taking square roots of round-off sized
    eigenvalues. Eigenvalues below ``RANK_TOL`` are treated as exact zeros.
    """
    rho = _as_density(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"two-qubit state required, got shape {rho.shape}")
    vals, vecs = herm_eig(rho)
    keep = vals > RANK_TOL * max(vals[-1], 0.0)
    a = vecs[:, keep] * np.sqrt(vals[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(a.T @ _YY @ a, compute_uv=False)
    lam[: sv.size] = sv
    return clamp(max(0.0, lam[0] - lam[1:].sum()))


def two_tangle(rho: np.ndarray) -> float:
    return concurrence_mixed_2q(rho) ** 2


def mutual_info_linear(rho: np.ndarray, cut: Bipartition) -> float:
    """S_A + S_B - S_AB with linear entropies."""
    rho = _as_density(rho)
    n = cut.n_qubits
    s_a = 1 - purity(partial_trace(rho, cut.side_a, n))
    s_b = 1 - purity(partial_trace(rho, cut.side_b, n))
    s_ab = 1 - purity(rho)
    return clamp(s_a + s_b - s_ab)


def mw_pure(psi: np.ndarray) -> float:
    """Meyer-Wallach measure as the mean of 2 (1 - tr rho_i^2) over qubits."""
    n = _n(psi)
    total = sum(2 * (1 - purity(reduced(psi, [i], n))) for i in range(1, n + 1))
    return clamp(total / n)


def _restrict(psi: np.ndarray, i: int, b: int, n: int) -> np.ndarray:
    """Amplitudes of psi with qubit i fixed to b, that qubit removed."""
    t = np.asarray(psi).reshape((2,) * n)
    return np.take(t, b, axis=i - 1).ravel()


def wedge_distance(u: np.ndarray, v: np.ndarray) -> float:
    """sum_{x<y} |u_x v_y - u_y v_x|^2."""
    m = np.outer(u, v)
    w = m - m.T
    return float(np.sum(np.abs(np.triu(w, 1)) ** 2))


def mw_operational(psi: np.ndarray) -> float:
    """Meyer-Wallach measure in its original form, (4/N) sum_i D(l_i(0) psi, l_i(1) psi)."""
    psi = np.asarray(psi, dtype=complex)
    n = _n(psi)
    total = sum(
        wedge_distance(_restrict(psi, i, 0, n), _restrict(psi, i, 1, n)) for i in range(1, n + 1)
    )
    return clamp(4 * total / n)


def global_tangle_sum(rho: np.ndarray) -> float:
    """(2/N) times the sum of the 2-tangles of all two-qubit marginals."""
    rho = _as_density(rho)
    n = n_qubits_of(rho)
    total = sum(two_tangle(partial_trace(rho, pair, n)) for pair in combinations(range(1, n + 1), 2))
    return clamp(2 * total / n)


def subset_masks(n: int):
    """Nonempty proper subsets of 1..n as sorted tuples, enumerated by bitmask."""
    for mask in range(1, 2**n - 1):
        yield tuple(q for q in range(1, n + 1) if mask >> (n - q) & 1)


def generalized_concurrence_pure(psi: np.ndarray) -> float:
    """2^{1-N/2} sqrt((2^N - 2) - sum over all reduced states of their purity)."""
    psi = np.asarray(psi, dtype=complex)
    n = _n(psi)
    if n > 10:
        raise ValueError("generalized concurrence limited to n <= 10")
    total = sum(purity(reduced(psi, sub, n)) for sub in subset_masks(n))
    inner = (2**n - 2) - total
    return float(2 ** (1 - n / 2) * np.sqrt(max(0.0, inner)))
