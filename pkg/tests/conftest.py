import numpy as np
import pytest

from jcpurity import coherent_state
from jcpurity.kernels import BACKENDS


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Kernel table of one backend; every kernel test runs against each."""
    return BACKENDS[request.param]


@pytest.fixture(scope="session")
def coherent49():
    return coherent_state(49.0)


@pytest.fixture(scope="session")
def grid200():
    return np.linspace(0.0, 50.0, 200)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
