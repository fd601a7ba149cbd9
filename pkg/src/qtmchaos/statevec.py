"""Dense state vectors for the head + tape spin network.

Basis ordering is lexicographic in ``|j^(S) k^(1) ... l^(M)>`` with the head
as the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

MAX_SPINS = 16
NORM_TOL = 1e-9
UNITARY_TOL = 1e-12

_TAPE_STATES = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
}
_ALIASES = {"zero": "0", "one": "1", "plus": "+", "minus": "-"}


def _tape_vector(spec) -> np.ndarray:
    key = _ALIASES.get(str(spec).strip().lower(), str(spec).strip())
    try:
        return _TAPE_STATES[key]
    except KeyError:
        raise ValueError(f"unknown tape state {spec!r}; use 0, 1, +, - "
                         "(or zero, one, plus, minus)") from None


@dataclass(frozen=True)
class NetworkState:
    num_spins: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if not 2 <= self.num_spins <= MAX_SPINS:
            raise ValueError(f"num_spins must be in [2, {MAX_SPINS}], got {self.num_spins}")
        if amps.shape != (2 ** self.num_spins,):
            raise ValueError(f"expected {2 ** self.num_spins} amplitudes, got shape {amps.shape}")
        drift = abs(np.linalg.norm(amps) - 1.0)
        if drift > NORM_TOL:
            raise ValueError(f"state is not normalized (|norm - 1| = {drift:.3e})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __eq__(self, other):
        if not isinstance(other, NetworkState):
            return NotImplemented
        return (self.num_spins == other.num_spins
                and np.array_equal(self.amplitudes, other.amplitudes))

    __hash__ = None


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def is_valid(self, atol: float = 1e-12) -> bool:
        rho = self.entries
        if not np.allclose(rho, rho.conj().T, atol=atol, rtol=0):
            return False
        if abs(np.trace(rho) - 1.0) > atol:
            return False
        return bool(np.linalg.eigvalsh(rho).min() >= -atol)


@dataclass(frozen=True)
class BlochVector:
    l1: float
    l2: float
    l3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.l1, self.l2, self.l3])

    def norm(self) -> float:
        return float(np.sqrt(self.l1 ** 2 + self.l2 ** 2 + self.l3 ** 2))


def head_vector(head_angle: float) -> np.ndarray:
    """cos(phi/2)|0> - i sin(phi/2)|1>."""
    return np.array([np.cos(head_angle / 2), -1j * np.sin(head_angle / 2)])


def make_product_state(head_angle: float, tape_spec: Sequence) -> NetworkState:
    """Product state of a rotated head and tape spins in 0/1/+/- states.

    >>> make_product_state(0.0, ["0"]).amplitudes
    array([1.+0.j, 0.+0.j, 0.+0.j, 0.+0.j])
    """
    if not np.isfinite(head_angle):
        raise ValueError("head_angle must be finite")
    if isinstance(tape_spec, str):
        tape_spec = [tape_spec]
    if len(tape_spec) < 1:
        raise ValueError("need at least one tape spin")
    amps = head_vector(head_angle)
    for spec in tape_spec:
        amps = np.kron(amps, _tape_vector(spec))
    return NetworkState(len(tape_spec) + 1, amps)


def _check_unitary(gate: np.ndarray):
    err = np.abs(gate.conj().T @ gate - np.eye(gate.shape[0])).max()
    if err > UNITARY_TOL:
        raise ValueError(f"gate is not unitary (max |U^dag U - 1| = {err:.3e})")


def apply_gate(state: NetworkState, gate, targets) -> NetworkState:
    """Apply a 2**k x 2**k unitary to spins ``targets`` (first = most significant)."""
    gate = np.asarray(gate, dtype=np.complex128)
    targets = [int(targets)] if np.isscalar(targets) else [int(t) for t in targets]
    k = len(targets)
    if gate.shape != (2 ** k, 2 ** k):
        raise ValueError(f"gate shape {gate.shape} does not act on {k} spin(s)")
    if len(set(targets)) != k:
        raise ValueError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < state.num_spins:
            raise ValueError(f"target {t} out of range for {state.num_spins} spins")
    _check_unitary(gate)

    n = state.num_spins
    psi = state.amplitudes.reshape((2,) * n)
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets)
    return NetworkState(n, out.reshape(-1))


def inner_product(a: NetworkState, b: NetworkState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.num_spins != b.num_spins:
        raise ValueError(f"dimension mismatch: {a.num_spins} vs {b.num_spins} spins")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def partial_trace(state: NetworkState, keep: int) -> DensityMatrix:
    """Reduced density matrix of a single spin."""
    if not 0 <= keep < state.num_spins:
        raise ValueError(f"spin {keep} out of range for {state.num_spins} spins")
    rho = kernels.reduced_density(state.amplitudes, state.num_spins, keep, backend="numpy")
    return DensityMatrix(rho)


def bloch_vector(dm: DensityMatrix) -> BlochVector:
    """Expectation values of (lambda1, lambda2, lambda3) in the state ``dm``."""
    if dm.dim != 2:
        raise ValueError(f"Bloch vector needs a single-spin matrix, got dim {dm.dim}")
    l1, l2, l3 = kernels.bloch_components(dm.entries)
    return BlochVector(float(l1), float(l2), float(l3))
