"""Local dephasing and amplitude-damping channels on qubit registers."""

from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .linalg import HERMITIAN_TOL, hermitian_deviation, herm_eigenvalues, n_qubits_of

COMPLETENESS_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-9

Label = Literal["dephasing", "amplitude_damping"]


@dataclass(frozen=True)
class QubitChannel:
    """Single-qubit channel given by its Kraus operators."""

    kraus_ops: tuple[np.ndarray, ...] = field(repr=False)
    label: str
    p: float

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        object.__setattr__(self, "kraus_ops", ops)
        for k in ops:
            if k.shape != (2, 2):
                raise ValueError(f"Kraus operator has shape {k.shape}")
        gram = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(gram - np.eye(2)))
        if dev > COMPLETENESS_TOL:
            raise ValueError(f"Kraus set is not trace preserving (deviation {dev:.2e})")

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        """Apply to a single-qubit density matrix."""
        return sum(k @ rho @ k.conj().T for k in self.kraus_ops)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


def dephasing(p: float) -> QubitChannel:
    p = _check_p(p)
    ops = (
        np.sqrt(1 - p) * np.eye(2),
        np.sqrt(p) * np.diag([1.0, 0.0]),
        np.sqrt(p) * np.diag([0.0, 1.0]),
    )
    return QubitChannel(ops, "dephasing", p)


def amplitude_damping(p: float) -> QubitChannel:
    p = _check_p(p)
    e0 = np.array([[1, 0], [0, np.sqrt(1 - p)]])
    e1 = np.array([[0, np.sqrt(p)], [0, 0]])
    return QubitChannel((e0, e1), "amplitude_damping", p)


CHANNELS = {"dephasing": dephasing, "amplitude_damping": amplitude_damping}
ALIASES = {"ad": "amplitude_damping", "d": "dephasing", "pd": "dephasing"}


def make_channel(label: str, p: float) -> QubitChannel:
    label = ALIASES.get(label, label)
    try:
        return CHANNELS[label](p)
    except KeyError:
        raise ValueError(f"unknown channel {label!r}") from None


@dataclass(frozen=True)
class NoiseClock:
    """Markovian time parametrisation p(t) = 1 - exp(-gamma t)."""

    gamma: float
    t: float

    @property
    def p(self) -> float:
        if self.gamma < 0 or self.t < 0:
            raise ValueError("gamma and t must be nonnegative")
        return float(-np.expm1(-self.gamma * self.t))


def check_density(rho: np.ndarray, psd: bool = True) -> int:
    """Validate a density matrix and return its qubit count."""
    n = n_qubits_of(rho)
    dev = hermitian_deviation(rho)
    if dev > HERMITIAN_TOL:
        raise ValueError(f"density matrix not Hermitian (deviation {dev:.2e})")
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {tr!r}")
    if psd:
        lo = herm_eigenvalues(rho)[0]
        if lo < -PSD_TOL:
            raise ValueError(f"density matrix has eigenvalue {lo:.3e}")
    return n


def apply_on_qubit(ch: QubitChannel, rho: np.ndarray, i: int) -> np.ndarray:
    """Apply ``ch`` to qubit ``i`` (1-based) of an n-qubit density matrix."""
    n = n_qubits_of(rho)
    if not 1 <= i <= n:
        raise ValueError(f"qubit index {i} out of range 1..{n}")
    left, right = 2 ** (i - 1), 2 ** (n - i)
    t = np.asarray(rho, dtype=complex).reshape(left, 2, right, left, 2, right)
    out = np.zeros_like(t)
    for k in ch.kraus_ops:
        out += np.einsum("ab,xbyucv,dc->xayudv", k, t, k.conj(), optimize=True)
    return out.reshape(rho.shape)


def apply_all(ch: QubitChannel, rho: np.ndarray) -> np.ndarray:
    """Apply the same channel independently to every qubit."""
    n = n_qubits_of(rho)
    for i in range(1, n + 1):
        rho = apply_on_qubit(ch, rho, i)
    return rho


@contextmanager
def perturbed_amplitude_damping(angle: float = 0.05):
    """Temporarily replace the AD factory with a rotated (still CPTP) Kraus set.

    Used to check that the verification suite notices a wrong channel.
    """
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])

    def faulty(p: float) -> QubitChannel:
        good = amplitude_damping(p)
        return QubitChannel((rot @ good.kraus_ops[0], good.kraus_ops[1]), "amplitude_damping", good.p)

    original = CHANNELS["amplitude_damping"]
    CHANNELS["amplitude_damping"] = faulty
    try:
        yield
    finally:
        CHANNELS["amplitude_damping"] = original
