import numpy as np
import pytest

from qboxbloch import _kernels

BACKENDS = [pytest.param((_kernels.jacobi_eigh_numpy, _kernels.conjugate_numpy), id="numpy")]
if _kernels.HAVE_NUMBA:
    BACKENDS.append(pytest.param((_kernels.jacobi_eigh_numba, _kernels.conjugate_numba), id="numba"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    """(eigh, conjugate) pair for each available kernel implementation."""
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
