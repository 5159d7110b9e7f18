"""Dense complex-matrix kernel for small qubit registers.

Qubits are numbered from 1 and qubit 1 is the leftmost tensor factor, so the
basis index of ``|k_1 ... k_N>`` is ``sum_i k_i * 2**(N - i)``.
"""

from functools import reduce
from typing import Iterable

import numpy as np

HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not mats:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def n_qubits_of(mat: np.ndarray) -> int:
    dim = mat.shape[0]
    n = dim.bit_length() - 1
    if dim != 2**n or mat.shape != (dim, dim):
        raise ValueError(f"expected a 2^n x 2^n matrix, got shape {mat.shape}")
    return n


def _check_indices(qubits: Iterable[int], n: int) -> list[int]:
    qs = sorted(set(int(q) for q in qubits))
    for q in qs:
        if not 1 <= q <= n:
            raise ValueError(f"qubit index {q} out of range 1..{n}")
    return qs


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def partial_trace(rho: np.ndarray, keep: Iterable[int], n: int) -> np.ndarray:
    """Reduced matrix on the qubits in ``keep`` (1-based), in ascending qubit order.

    An empty ``keep`` traces everything out and returns the 1x1 trace.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2**n, 2**n):
        raise ValueError(f"rho has shape {rho.shape}, expected {(2**n, 2**n)}")
    kept = [q - 1 for q in _check_indices(keep, n)]
    traced = [q for q in range(n) if q not in kept]
    t = rho.reshape((2,) * (2 * n))
    perm = kept + traced + [n + q for q in kept] + [n + q for q in traced]
    dk, dt = 2 ** len(kept), 2 ** len(traced)
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def partial_transpose(rho: np.ndarray, subset: Iterable[int], n: int) -> np.ndarray:
    """Transpose the tensor factors listed in ``subset`` (1-based)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2**n, 2**n):
        raise ValueError(f"rho has shape {rho.shape}, expected {(2**n, 2**n)}")
    axes = list(range(2 * n))
    for q in _check_indices(subset, n):
        axes[q - 1], axes[n + q - 1] = axes[n + q - 1], axes[q - 1]
    return rho.reshape((2,) * (2 * n)).transpose(axes).reshape(2**n, 2**n)


def hermitian_deviation(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def herm_eigenvalues(h: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises ``ValueError`` when ``h`` deviates from its adjoint by more than
    ``HERMITIAN_TOL`` in any entry; inputs are never silently symmetrized.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    dev = hermitian_deviation(h)
    if dev > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return np.linalg.eigvalsh(h)


def herm_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Like ``herm_eigenvalues`` but also returns the eigenvectors as columns."""
    herm_eigenvalues(h)
    return np.linalg.eigh(np.asarray(h, dtype=complex))


def embed(op: np.ndarray, qubits: Iterable[int], n: int) -> np.ndarray:
    """Full 2^n operator acting as ``op`` on the listed qubits, in the listed order.

    ``qubits`` is an ordered sequence; ``op``'s first tensor factor acts on
    ``qubits[0]``. Identity elsewhere.
    """
    qs = [int(q) for q in qubits]
    if len(set(qs)) != len(qs):
        raise ValueError("repeated qubit index")
    _check_indices(qs, n)
    m = len(qs)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**m, 2**m):
        raise ValueError(f"operator shape {op.shape} does not match {m} qubits")
    rest = [q for q in range(1, n + 1) if q not in qs]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    # full acts on order qs + rest; permute tensor axes back to 1..n
    order = qs + rest
    inv = [order.index(q) for q in range(1, n + 1)]
    t = full.reshape((2,) * (2 * n))
    t = t.transpose(inv + [n + i for i in inv])
    return t.reshape(2**n, 2**n)


def permute_qubits(rho: np.ndarray, order: list[int], n: int) -> np.ndarray:
    """Reorder tensor factors so that new qubit j is old qubit ``order[j-1]``."""
    axes = [q - 1 for q in order]
    t = np.asarray(rho).reshape((2,) * (2 * n))
    return t.transpose(axes + [n + a for a in axes]).reshape(2**n, 2**n)
