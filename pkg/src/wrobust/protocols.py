"""Teleportation and splitting of a qubit through decohered GHZ and W_A resources.

Layout: qubit 0 is Alice's unknown input, resource qubit 1 belongs to Alice
and resource qubits 2..n_bobs+1 to the Bobs. Noise acts on every resource
qubit before Alice's Bell measurement; measurements and corrections are ideal.
"""

import itertools
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channels import apply_all, make_channel
from .linalg import X, Z, embed, kron, partial_trace, permute_qubits, projector
from .measures import Bipartition, negativity
from .states import decode_unitary, ghz, w_asymmetric, zeros

CLASSICAL_FIDELITY = 2 / 3
DEGENERATE_PROB = 1e-14
MAX_RESOURCE_QUBITS = 10

Resource = Literal["ghz", "wa"]
Stage = Literal["teleport", "split"]

_S = 2**-0.5
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
BELL = {
    "phi+": (np.array([1, 0, 0, 1]) * _S, 0, 0),
    "phi-": (np.array([1, 0, 0, -1]) * _S, 1, 0),
    "psi+": (np.array([0, 1, 1, 0]) * _S, 0, 1),
    "psi-": (np.array([0, 1, -1, 0]) * _S, 1, 1),
}

# Six Pauli eigenstates: a 2-design, so their mean reproduces the Haar average
# of any function quadratic in the input state.
PAULI_STATES = (
    np.array([1, 0], dtype=complex),
    np.array([0, 1], dtype=complex),
    np.array([1, 1], dtype=complex) * _S,
    np.array([1, -1], dtype=complex) * _S,
    np.array([1, 1j], dtype=complex) * _S,
    np.array([1, -1j], dtype=complex) * _S,
)


@dataclass(frozen=True)
class InputQubit:
    theta: float
    phi: float

    @property
    def vector(self) -> np.ndarray:
        return np.array(
            [np.cos(self.theta / 2), np.exp(1j * self.phi) * np.sin(self.theta / 2)], dtype=complex
        )

    @classmethod
    def from_vector(cls, v) -> "InputQubit":
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        if abs(v[0]) > 1e-15:
            v = v * np.exp(-1j * np.angle(v[0]))
        theta = 2 * np.arctan2(abs(v[1]), abs(v[0]))
        return cls(float(theta), float(np.angle(v[1])) if abs(v[1]) > 1e-15 else 0.0)


@dataclass(frozen=True)
class ProtocolRun:
    resource: Resource
    n_bobs: int
    p: float
    channel: str = "amplitude_damping"
    stage: Stage = "teleport"

    def __post_init__(self):
        if self.resource not in ("ghz", "wa"):
            raise ValueError(f"unknown resource {self.resource!r}")
        if self.stage not in ("teleport", "split"):
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.n_bobs < 2:
            raise ValueError("need at least two Bobs")
        if self.n_bobs + 1 > MAX_RESOURCE_QUBITS:
            raise ValueError(f"simulation limited to {MAX_RESOURCE_QUBITS} resource qubits")
        object.__setattr__(self, "channel", make_channel(self.channel, self.p).label)


@dataclass
class BranchOutcome:
    bell_index: str
    a1: int
    a2: int
    probability: float
    conditional_state: np.ndarray | None
    x_outcomes: tuple[int, ...] = ()


def resource_state(resource: Resource, n_bobs: int) -> np.ndarray:
    """Shared state on Alice's resource qubit plus the Bobs.

    For W_A the first qubit's |1> is paired with |W_n>, so that the Phi
    outcomes leave the Bobs in alpha|0..0> +- beta|W_n>.
    """
    if resource == "ghz":
        return ghz(n_bobs + 1)
    if resource == "wa":
        return w_asymmetric(n_bobs, w_on=1)
    raise ValueError(f"unknown resource {resource!r}")


def noisy_resource(run: ProtocolRun) -> np.ndarray:
    return apply_all(make_channel(run.channel, run.p), projector(resource_state(run.resource, run.n_bobs)))


def _bell_blocks(rho: np.ndarray, pair: tuple[int, int], n: int):
    """Unnormalized conditional operators on the other qubits, one per Bell outcome."""
    a, b = pair
    rest = [q for q in range(1, n + 1) if q not in pair]
    moved = permute_qubits(rho, [a, b] + rest, n).reshape(4, 2 ** len(rest), 4, 2 ** len(rest))
    for name, (vec, a1, a2) in BELL.items():
        yield name, a1, a2, np.einsum("x,xiyj,y->ij", vec.conj(), moved, vec)


def bell_measure(rho: np.ndarray, pair: tuple[int, int], n: int) -> list[BranchOutcome]:
    """Bell measurement on the ordered qubit pair; normalized states of the other qubits."""
    out = []
    for name, a1, a2, cond in _bell_blocks(rho, pair, n):
        prob = float(np.trace(cond).real)
        state = cond / prob if prob > DEGENERATE_PROB else None
        out.append(BranchOutcome(name, a1, a2, prob, state))
    return out


def _correction(a1: int, a2: int, m: int = 0) -> np.ndarray:
    """Undo Z^m X^a2 Z^a1 on the received qubit."""
    return np.linalg.matrix_power(Z, a1) @ np.linalg.matrix_power(X, a2) @ np.linalg.matrix_power(Z, m)


def _ghz_teleport_out(state: np.ndarray, a1: int, a2: int, nb: int) -> np.ndarray:
    """Logical 2x2 block after the encoded correction Z_L^a1 X_L^a2."""
    x_l = kron(*[X] * nb)
    z_l = embed(Z, [1], nb)
    c = np.linalg.matrix_power(z_l, a1) @ np.linalg.matrix_power(x_l, a2)
    s = c @ state @ c.conj().T
    basis = np.stack([zeros(nb), np.flip(zeros(nb))], axis=1)
    return basis.conj().T @ s @ basis


def _x_basis_blocks(state: np.ndarray, nb: int, receiver: int):
    """Receiver blocks for each X-basis outcome string of the non-receivers."""
    others = [q for q in range(1, nb + 1) if q != receiver]
    h = np.array([[1, 1], [1, -1]], dtype=complex) * _S
    rot = embed(kron(*[h] * len(others)), others, nb)
    s = rot @ state @ rot.conj().T
    s = permute_qubits(s, [receiver] + others, nb).reshape(2, 2 ** len(others), 2, 2 ** len(others))
    for idx, bits in enumerate(itertools.product((0, 1), repeat=len(others))):
        yield bits, s[:, idx, :, idx]


def _ghz_split_out(state: np.ndarray, a1: int, a2: int, nb: int, receiver: int) -> np.ndarray:
    """Non-receivers measure X; the receiver undoes Z^M X^a2 Z^a1."""
    out = np.zeros((2, 2), dtype=complex)
    for bits, block in _x_basis_blocks(state, nb, receiver):
        c = _correction(a1, a2, sum(bits))
        out += c @ block @ c.conj().T
    return out


def _wa_out(state: np.ndarray, a1: int, a2: int, nb: int, receiver: int, stage: Stage) -> np.ndarray:
    """Decode |W_n> onto the receiver's qubit, then apply X^a2 / Z^a1 there."""
    d = decode_unitary(nb)
    if receiver != 1:
        d = embed(SWAP, [1, receiver], nb) @ d
    s = d @ state @ d.conj().T
    c = embed(_correction(a1, a2), [receiver], nb)
    s = c @ s @ c.conj().T
    if stage == "split":
        return partial_trace(s, [receiver], nb)
    # teleport stage: overlap with |psi> on the receiver and vacuum elsewhere
    others = [q for q in range(1, nb + 1) if q != receiver]
    s = permute_qubits(s, [receiver] + others, nb).reshape(2, 2 ** len(others), 2, 2 ** len(others))
    return s[:, 0, :, 0]


def output_operator(run: ProtocolRun, rho_in: np.ndarray, receiver: int = 1, rho_res: np.ndarray | None = None) -> np.ndarray:
    """2x2 operator O with fidelity <psi|O|psi>; linear in the input operator ``rho_in``.

    Teleport stage: the logical block of the Bobs' corrected state (trace < 1
    when noise leaks out of the code space). Split stage: the receiver's state.
    """
    nb = run.n_bobs
    if not 1 <= receiver <= nb:
        raise ValueError(f"receiver must be a Bob in 1..{nb}")
    if rho_res is None:
        rho_res = noisy_resource(run)
    out = np.zeros((2, 2), dtype=complex)
    for _, a1, a2, cond in _bell_blocks(np.kron(rho_in, rho_res), (1, 2), nb + 2):
        if np.max(np.abs(cond)) < DEGENERATE_PROB:
            continue
        if run.resource == "wa":
            out += _wa_out(cond, a1, a2, nb, receiver, run.stage)
        elif run.stage == "teleport":
            out += _ghz_teleport_out(cond, a1, a2, nb)
        else:
            out += _ghz_split_out(cond, a1, a2, nb, receiver)
    return out


def ghz_split_branches(run: ProtocolRun, inp: InputQubit, receiver: int = 1) -> list[BranchOutcome]:
    """Every (Bell outcome, X outcomes) branch of the GHZ splitting protocol.

    Each carries the receiver's corrected, normalized single-qubit state.
    """
    if run.resource != "ghz":
        raise ValueError("X-basis branches exist only for the GHZ protocol")
    nb = run.n_bobs
    rho = np.kron(projector(inp.vector), noisy_resource(run))
    out = []
    for name, a1, a2, cond in _bell_blocks(rho, (1, 2), nb + 2):
        for bits, block in _x_basis_blocks(cond, nb, receiver):
            c = _correction(a1, a2, sum(bits))
            block = c @ block @ c.conj().T
            prob = float(np.trace(block).real)
            state = block / prob if prob > DEGENERATE_PROB else None
            out.append(BranchOutcome(name, a1, a2, prob, state, tuple(bits)))
    return out


def _fidelity(run: ProtocolRun, psi: np.ndarray, receiver: int, rho_res=None) -> float:
    o = output_operator(run, projector(psi), receiver, rho_res)
    return float(np.real(psi.conj() @ o @ psi))


def run_teleport(run: ProtocolRun, inp: InputQubit) -> float:
    if run.stage != "teleport":
        run = ProtocolRun(run.resource, run.n_bobs, run.p, run.channel, "teleport")
    return _fidelity(run, inp.vector, 1)


def run_split(run: ProtocolRun, inp: InputQubit, receiver: int = 1) -> float:
    if run.stage != "split":
        run = ProtocolRun(run.resource, run.n_bobs, run.p, run.channel, "split")
    return _fidelity(run, inp.vector, receiver)


def avg_fidelity(run: ProtocolRun, receiver: int = 1) -> float:
    """Haar-average fidelity, exact via the six Pauli eigenstates."""
    rho_res = noisy_resource(run)
    return float(np.mean([_fidelity(run, psi, receiver, rho_res) for psi in PAULI_STATES]))


def process_map(run: ProtocolRun, receiver: int = 1) -> np.ndarray:
    """Output operators for the four inputs |i><j|, shape (2, 2, 2, 2)."""
    rho_res = noisy_resource(run)
    out = np.empty((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1
            out[i, j] = output_operator(run, e, receiver, rho_res)
    return out


def haar_fidelity_samples(run: ProtocolRun, samples: int, rng: np.random.Generator, receiver: int = 1) -> np.ndarray:
    """Fidelities for Haar-random inputs, built from the linear process map."""
    m = process_map(run, receiver)
    v = rng.normal(size=(samples, 2)) + 1j * rng.normal(size=(samples, 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    outs = np.einsum("si,sj,ijab->sab", v, v.conj(), m)
    return np.einsum("sa,sab,sb->s", v.conj(), outs, v).real


def f_closed(resource: Resource, stage: Stage, p: float, n: int) -> float:
    """Closed-form average fidelities under amplitude damping for ``n`` Bobs.

    The GHZ expressions are written for the total resource size N = n + 1.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    N = n + 1
    if resource == "ghz" and stage == "teleport":
        return (2 + (1 - p) ** (N - 1) * (2 - p) + 2 * (1 - p) ** (N / 2) + p ** (N - 1) * (1 + p)) / 6
    if resource == "wa" and stage == "teleport":
        return (3 - 2 * p + p**2) / 3
    if resource == "ghz" and stage == "split":
        return (2 - p * (1 - p) + (1 - p) ** (N / 2)) / 3
    if resource == "wa" and stage == "split":
        return 1 - p / 3
    raise ValueError(f"unknown resource/stage {resource!r}/{stage!r}")


def fmax_bound(neg: float, d: int = 2) -> float:
    """Upper bound (2 + 2 N) / (d + 1) on teleportation fidelity from negativity N."""
    if neg < 0 or d < 2:
        raise ValueError("need neg >= 0 and d >= 2")
    return (2 + 2 * neg) / (d + 1)


def resource_negativity(run: ProtocolRun) -> float:
    """Negativity of the noisy resource across {Alice}:{Bobs}."""
    return negativity(noisy_resource(run), Bipartition({1}, run.n_bobs + 1))
