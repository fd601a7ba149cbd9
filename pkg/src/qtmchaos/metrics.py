"""Squared Hilbert-Schmidt ("Bures") distances and the overlap O'."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import kernels
from .drive import DriveSequence
from .gates import Trajectory, head_rotation, run, step_matrix
from .statevec import DensityMatrix, NetworkState, apply_gate, inner_product

SUBSYSTEMS = ("head", "tape", "total")
D2_TOL = 1e-12


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return x.entries
    if isinstance(x, NetworkState):
        x = x.amplitudes
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 1:
        return np.outer(x, x.conj())
    if x.ndim == 2 and x.shape[0] == x.shape[1]:
        return x
    raise ValueError(f"expected a state vector or square matrix, got shape {x.shape}")


def bures_d2(rho, rho_prime) -> float:
    """Tr{(rho - rho')^2}. Pure states (vectors) are turned into projectors."""
    a, b = _as_matrix(rho), _as_matrix(rho_prime)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.real(np.trace(d @ d)))


def pure_d2(psi: NetworkState, phi: NetworkState) -> float:
    """2 (1 - |<psi|phi>|^2), the pure-state form of :func:`bures_d2`."""
    return 2.0 * (1.0 - abs(inner_product(psi, phi)) ** 2)


def d2_series(rho_a: np.ndarray, rho_b: np.ndarray) -> np.ndarray:
    """Stepwise Tr{(a_t - b_t)^2} for stacks of Hermitian matrices."""
    d = rho_a - rho_b
    return np.einsum("tij,tji->t", d, d).real


@dataclass(frozen=True)
class DistanceSeries:
    n: np.ndarray
    d2: np.ndarray
    subsystem: str

    def __post_init__(self):
        if self.subsystem not in SUBSYSTEMS:
            raise ValueError(f"subsystem must be one of {SUBSYSTEMS}")
        if self.d2.size and (self.d2.min() < -D2_TOL or self.d2.max() > 2 + D2_TOL):
            raise ValueError("D^2 left [0, 2]")

    def __len__(self):
        return self.n.shape[0]


def perturbed_initial(initial: NetworkState, delta: float) -> NetworkState:
    """Rotate the head of ``initial`` by ``delta`` (the ``alpha'_0`` seed)."""
    if delta == 0:
        return initial
    return apply_gate(initial, head_rotation(delta), [0])


def perturbed_pair(drive: DriveSequence, initial: NetworkState, delta: float):
    """((drive, drive'), (initial, initial')) for a perturbation ``delta``."""
    return (drive, drive.perturbed(delta)), (initial, perturbed_initial(initial, delta))


def trajectory_d2(traj: Trajectory, traj_pert: Trajectory, subsystem: str,
                  backend=None) -> np.ndarray:
    steps = min(len(traj), len(traj_pert))
    if subsystem == "total":
        sa, sb = traj.states[:steps], traj_pert.states[:steps]
        if sa.shape[1] <= 16:
            # Tr{(P - P')^2} on the projectors themselves
            a = np.einsum("ti,tj->tij", sa, sa.conj())
            b = np.einsum("ti,tj->tij", sb, sb.conj())
            return d2_series(a, b)
        ov = np.einsum("ti,ti->t", sa.conj(), sb)
        return 2.0 * (1.0 - np.abs(ov) ** 2)
    if subsystem not in SUBSYSTEMS:
        raise ValueError(f"subsystem must be one of {SUBSYSTEMS}")
    keep = 0 if subsystem == "head" else 1
    return d2_series(traj.reduced(keep, backend)[:steps], traj_pert.reduced(keep, backend)[:steps])


def distance_series(driver_pair: Tuple[DriveSequence, DriveSequence],
                    initial_pair: Tuple[NetworkState, NetworkState],
                    subsystem: str, steps: int, backend=None) -> DistanceSeries:
    """D^2(n), n = 0..steps, between two runs on ``subsystem`` (head, tape, total)."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if subsystem not in SUBSYSTEMS:
        raise ValueError(f"subsystem must be one of {SUBSYSTEMS}")
    ta = run(initial_pair[0], driver_pair[0], steps, backend=backend)
    tb = run(initial_pair[1], driver_pair[1], steps, backend=backend)
    return DistanceSeries(np.arange(steps + 1), trajectory_d2(ta, tb, subsystem, backend), subsystem)


def overlap_oprime(traj: Trajectory, traj_pert: Trajectory, n: int) -> float:
    """O' = |<psi_0(delta)| U(delta)^dag U(0) |psi_0(0)>|^2 at step n.

    ``U(0) psi_0(0)`` is read from ``traj``; the perturbed evolution is then
    undone gate by gate with the angles of ``traj_pert`` and the result is
    projected on the perturbed initial state.
    """
    if not (0 <= n <= traj.total_steps and n <= traj_pert.total_steps):
        raise IndexError(f"step {n} outside the trajectories")
    vec = traj.states[n]
    for k in range(n, 0, -1):
        vec = step_matrix(k, traj_pert.angles, traj_pert.num_spins).conj().T @ vec
    return abs(np.vdot(traj_pert.states[0], vec)) ** 2
