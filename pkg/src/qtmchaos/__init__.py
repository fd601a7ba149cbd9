"""Simulator and closed-form oracle for a two-spin quantum Turing machine
whose head is rotated by a Fibonacci angle sequence."""

from .analytic import (
    find_periodic_orbit,
    head_bloch_superposed,
    head_stability,
    periodic_orbit_check,
    primitive_bloch,
    table1_d2,
    tape_lambda3,
    tape_stability,
)
from .drive import Angle, DriveSequence, fib_number, fibonacci_angles
from .gates import Trajectory, head_rotation, lambda_operator, qcnot, run
from .metrics import bures_d2, distance_series, overlap_oprime
from .statevec import (
    BlochVector,
    DensityMatrix,
    NetworkState,
    apply_gate,
    bloch_vector,
    inner_product,
    make_product_state,
    partial_trace,
)

__version__ = "0.1.0"
