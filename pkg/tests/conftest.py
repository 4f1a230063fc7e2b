import pytest

from volterra_decay.solver import Grid

from .helpers import ACCEPTANCE_LINES, make_problem


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def worked():
    """a=2, h(u) = -0.5 u^2, f(t) = 0.1 exp(-t)."""
    return make_problem()


@pytest.fixture
def fine_grid():
    return Grid(20.0, 20000)
