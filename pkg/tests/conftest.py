import numpy as np
import pytest

from mcsa.core import Box, Oracle, StochasticProblem


def toy_problem():
    """d=1 on [0, 1]: f(x) = x, g(x) = 0.5 - x, no noise."""
    objective = Oracle(lambda x, rng: (float(x[0]), np.array([1.0])))
    constraint = Oracle(lambda x, rng: (0.5 - float(x[0]), np.array([-1.0])))
    return StochasticProblem(
        domain=Box.unit(1),
        objective=objective,
        constraints=[constraint],
        objective_fn=lambda x: float(x[0]),
        constraints_fn=lambda x: np.array([0.5 - x[0]]),
        x_star=np.array([0.5]),
        f_star=0.5,
        name="toy",
    )


@pytest.fixture
def toy():
    return toy_problem()


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the lines are echoed in the terminal summary."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
