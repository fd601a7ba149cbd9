"""Head rotation, QCNOT and the alternating Turing-machine step protocol."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .drive import DriveSequence
from .statevec import NORM_TOL, NetworkState, apply_gate

P00 = np.array([[1, 0], [0, 0]], dtype=complex)
P11 = np.array([[0, 0], [0, 1]], dtype=complex)
P01 = np.array([[0, 1], [0, 0]], dtype=complex)
P10 = np.array([[0, 0], [1, 0]], dtype=complex)

_LAMBDA = {
    0: P00 + P11,
    1: P01 + P10,
    2: 1j * P01 - 1j * P10,
    3: P11 - P00,
}


def lambda_operator(kind: int) -> np.ndarray:
    """SU(2) generator ``kind`` in the (|0>, |1>) basis.

    Note the sign convention ``lambda3 = P11 - P00``, so ``|0>`` sits at
    ``lambda3 = -1``.
    """
    try:
        return _LAMBDA[int(kind)].copy()
    except (KeyError, ValueError, TypeError):
        raise ValueError(f"lambda operator kind must be 0, 1, 2 or 3, got {kind!r}") from None


def head_rotation(alpha: float) -> np.ndarray:
    """cos(alpha/2) 1 - i sin(alpha/2) lambda1."""
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    return np.cos(alpha / 2) * _LAMBDA[0] - 1j * np.sin(alpha / 2) * _LAMBDA[1]


def qcnot() -> np.ndarray:
    """P00 (x) lambda1 + P11 (x) 1 on (head, tape): flips the tape when the head is |0>."""
    return np.kron(P00, _LAMBDA[1]) + np.kron(P11, _LAMBDA[0])


@dataclass(frozen=True)
class Trajectory:
    """States ``psi_0 .. psi_T`` of one run, plus the drive that produced them.

    ``angles[m - 1]`` is the rotation applied at step ``2m - 1``.
    """

    states: np.ndarray
    num_spins: int
    drive: DriveSequence
    angles: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def total_steps(self) -> int:
        return self.states.shape[0] - 1

    def state(self, n: int) -> NetworkState:
        if not 0 <= n <= self.total_steps:
            raise IndexError(f"step {n} outside trajectory 0..{self.total_steps}")
        return NetworkState(self.num_spins, self.states[n])

    def steps(self):
        """Iterate ``(n, NetworkState)`` pairs."""
        for n in range(len(self)):
            yield n, self.state(n)

    def reduced(self, keep: int, backend=None) -> np.ndarray:
        """Reduced 2x2 density matrices of spin ``keep`` at every step."""
        return kernels.reduced_density(self.states, self.num_spins, keep, backend=backend)

    def bloch(self, keep: int = 0, backend=None) -> np.ndarray:
        """(T+1, 3) Bloch vectors of spin ``keep`` (0 = head, 1 = first tape spin)."""
        return kernels.bloch_components(self.reduced(keep, backend=backend))


def step_gate(n: int, angles) -> tuple:
    """(gate, targets) applied at step ``n >= 1``."""
    if n % 2 == 1:
        return head_rotation(angles[(n - 1) // 2]), [0]
    return qcnot(), [0, 1]


def step_matrix(n: int, angles, num_spins: int) -> np.ndarray:
    """Full ``2**N x 2**N`` matrix of step ``n`` (head and tape 1 lead the ordering)."""
    gate, targets = step_gate(n, angles)
    return np.kron(gate, np.eye(2 ** (num_spins - len(targets))))


def run(initial: NetworkState, drive: DriveSequence, total_steps: int,
        backend=None) -> Trajectory:
    """Evolve ``initial`` for ``total_steps`` alternating steps.

    Odd step ``2m - 1`` rotates the head by ``alpha_m``; even step ``2m``
    applies the QCNOT between the head and tape spin 1.
    """
    if total_steps < 0:
        raise ValueError("total_steps must be >= 0")
    n_angles = (total_steps + 1) // 2
    angles = drive.angles(n_angles)
    if angles.shape[0] < n_angles:
        raise ValueError(f"drive supplied {angles.shape[0]} angles, need {n_angles}")
    states = kernels.evolve(initial.amplitudes, angles, total_steps,
                            initial.num_spins, backend=backend)
    drift = np.abs(np.linalg.norm(states, axis=1) - 1.0).max()
    assert drift <= NORM_TOL, f"norm drift {drift:.3e} exceeds {NORM_TOL}"
    states.flags.writeable = False
    return Trajectory(states, initial.num_spins, drive, angles)


def run_reference(initial: NetworkState, angles, total_steps: int) -> list:
    """Gate-by-gate evolution through :func:`apply_gate`; slow, used as an oracle."""
    out = [initial]
    state = initial
    for n in range(1, total_steps + 1):
        gate, targets = step_gate(n, angles)
        state = apply_gate(state, gate, targets)
        out.append(state)
    return out
