import functools

import pytest

from painleve_connection.integrator import solve_ivp


@functools.lru_cache(maxsize=None)
def trajectory(a, x_max, tol=1e-10):
    return solve_ivp(a, x_max, tol)


@pytest.fixture(scope="session")
def traj_cache():
    return trajectory


ACCEPTANCE_VERDICTS = {}


def record_verdict(criterion, passed, detail, suffix=""):
    """Store and print one acceptance line; ``suffix`` tags supplementary lines."""
    line = f"CRITERION {criterion}{suffix}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_VERDICTS[(criterion, suffix)] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_VERDICTS):
        terminalreporter.write_line(ACCEPTANCE_VERDICTS[key])
