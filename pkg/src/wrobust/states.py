"""GHZ, W and W-like state constructors and the two-qubit gate decomposition of W."""

from dataclasses import dataclass
from functools import reduce
from typing import Literal, Sequence

import numpy as np

from .linalg import embed

NORM_TOL = 1e-10


def basis_state(bits: Sequence[int]) -> np.ndarray:
    """Computational basis vector ``|b_1 ... b_n>`` (b_1 is the leftmost factor)."""
    n = len(bits)
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0/1, got {bits}")
        idx = 2 * idx + b
    v = np.zeros(2**n, dtype=complex)
    v[idx] = 1.0
    return v


def excitation(n: int, i: int) -> np.ndarray:
    """``|0 ... 1_i ... 0>`` with the excitation on qubit ``i`` (1-based)."""
    return basis_state([1 if q == i else 0 for q in range(1, n + 1)])


def zeros(n: int) -> np.ndarray:
    return basis_state([0] * n)


def _check_normalized(*weights: float, what: str) -> None:
    total = float(sum(weights))
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"{what} is not normalized (sum of squares = {total!r})")


def ghz(n: int, alpha: complex = 2**-0.5, beta: complex = 2**-0.5) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    _check_normalized(abs(alpha) ** 2, abs(beta) ** 2, what="(alpha, beta)")
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = alpha
    psi[-1] += beta
    return psi


def w(n: int) -> np.ndarray:
    """Uniform superposition of the n single-excitation basis states."""
    if n < 2:
        raise ValueError("W state needs n >= 2")
    psi = np.zeros(2**n, dtype=complex)
    for i in range(n):
        psi[1 << i] = 1 / np.sqrt(n)
    return psi


@dataclass(frozen=True)
class WLikeSpec:
    """Coefficients ``a_1..a_N`` of the single-excitation part plus the (alpha, beta) mix."""

    coeffs: tuple[complex, ...]
    alpha: complex = 1.0
    beta: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise ValueError("need at least two coefficients")
        _check_normalized(*(abs(c) ** 2 for c in self.coeffs), what="coeffs")
        _check_normalized(abs(self.alpha) ** 2, abs(self.beta) ** 2, what="(alpha, beta)")

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def uniform(cls, n: int, alpha: complex = 1.0, beta: complex = 0.0) -> "WLikeSpec":
        return cls(tuple([1 / np.sqrt(n)] * n), alpha, beta)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, mixed: bool = True) -> "WLikeSpec":
        """Random complex coefficients; ``mixed`` also draws a nonzero beta."""
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        a /= np.linalg.norm(a)
        if mixed:
            ab = rng.normal(size=2) + 1j * rng.normal(size=2)
            ab /= np.linalg.norm(ab)
            return cls(tuple(a), ab[0], ab[1])
        return cls(tuple(a))


def w_like(spec: WLikeSpec, variant: Literal["plain", "with_zero"] = "with_zero") -> np.ndarray:
    """W-like state ``alpha * sum_i a_i |1_i> + beta |0...0>``.

    ``plain`` drops the vacuum term (alpha = 1, beta = 0 regardless of spec).
    """
    n = spec.n
    psi = np.zeros(2**n, dtype=complex)
    for i, a in enumerate(spec.coeffs, start=1):
        psi[1 << (n - i)] = a
    if variant == "plain":
        return psi
    if variant != "with_zero":
        raise ValueError(f"unknown variant {variant!r}")
    psi *= spec.alpha
    psi[0] = spec.beta
    return psi


def w_asymmetric(n: int, w_on: int = 0) -> np.ndarray:
    """(n+1)-qubit state ``(|w_on>|W_n> + |1-w_on>|0...0>) / sqrt(2)``.

    The default ``w_on=0`` pairs the W state with the first qubit in ``|0>``.
    ``w_on=1`` gives the variant whose Bell-measurement outcomes are
    ``alpha|0..0> +- beta|W_n>`` for the Phi outcomes, which is the layout used
    by the teleportation protocol.
    """
    if n < 2:
        raise ValueError("W_A needs n >= 2")
    if w_on not in (0, 1):
        raise ValueError("w_on must be 0 or 1")
    first_w = np.zeros(2, dtype=complex)
    first_w[w_on] = 1
    first_z = np.zeros(2, dtype=complex)
    first_z[1 - w_on] = 1
    return (np.kron(first_w, w(n)) + np.kron(first_z, zeros(n))) / np.sqrt(2)


@dataclass(frozen=True)
class TwoQubitGateStep:
    """Excitation-splitting gate on the ordered qubit pair (i, j) with parameters (mu, nu)."""

    i: int
    j: int
    mu: int
    nu: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("gate needs two distinct qubits")
        if self.mu <= 0 or self.nu <= 0:
            raise ValueError("mu and nu must be positive")
        if self.nu > self.mu:
            raise ValueError(f"nu ({self.nu}) must not exceed mu ({self.mu})")


def u_step_matrix(step: TwoQubitGateStep) -> np.ndarray:
    """4x4 gate in the basis |00>,|01>,|10>,|11> of the ordered pair (i, j).

    ``|10> -> sqrt(nu/mu)|01> + sqrt((mu-nu)/mu)|10>``: a fraction nu/mu of the
    excitation on qubit i moves to qubit j.
    """
    c = np.sqrt((step.mu - step.nu) / step.mu)
    s = np.sqrt(step.nu / step.mu)
    return np.array(
        [[1, 0, 0, 0], [0, -c, s, 0], [0, s, c, 0], [0, 0, 0, 1]], dtype=complex
    )


def step_operator(step: TwoQubitGateStep, n: int) -> np.ndarray:
    return embed(u_step_matrix(step), [step.i, step.j], n)


def crosses(step: TwoQubitGateStep, k: int) -> bool:
    """Whether the step couples the two sides of the cut {1..k}:{k+1..n}."""
    return (step.i <= k) != (step.j <= k)


def w_decomposition(n: int, boundary_k: int) -> list[TwoQubitGateStep]:
    """Gate sequence (in application order) taking ``|1_k>`` to ``|W_n>``.

    The first step is the only one crossing the cut {1..k}:{k+1..n}: it splits
    the excitation k/n : (n-k)/n between qubits k and k+1. The remaining steps
    spread it uniformly inside each side, leftwards over qubits k..1 and
    rightwards over qubits k+1..n.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    k = boundary_k
    if not 1 <= k <= n - 1:
        raise ValueError(f"boundary_k must be in 1..{n - 1}, got {k}")
    steps = [TwoQubitGateStep(k, k + 1, n, n - k)]
    steps += [TwoQubitGateStep(j, j - 1, j, j - 1) for j in range(k, 1, -1)]
    steps += [TwoQubitGateStep(i + 1, i + 2, n - i, n - i - 1) for i in range(k, n - 1)]
    return steps


def steps_unitary(steps: Sequence[TwoQubitGateStep], n: int) -> np.ndarray:
    """Product of the step operators, first step applied first."""
    eye = np.eye(2**n, dtype=complex)
    return reduce(lambda acc, s: step_operator(s, n) @ acc, steps, eye)


def decode_unitary(n: int) -> np.ndarray:
    """Inverse of the k=1 preparation circuit: ``|W_n> -> |10..0>``, ``|0..0> -> |0..0>``."""
    return steps_unitary(w_decomposition(n, 1), n).conj().T
