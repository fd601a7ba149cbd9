import numpy as np
import pytest

from qtmchaos import kernels
from qtmchaos._accel import NUMBA_AVAILABLE

ACCEPTANCE_LINES = []

BACKENDS = ["numpy"] + (["numba"] if NUMBA_AVAILABLE else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile (or load cached) numba kernels before anything is timed
    psi = np.array([1, 0, 0, 0], dtype=complex)
    for b in BACKENDS:
        states = kernels.evolve(psi, [0.1], 2, 2, backend=b)
        kernels.reduced_density(states, 2, 0, backend=b)


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
