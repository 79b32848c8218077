import pytest

from helpers import PROBLEMS
from sgexpand.driver import solve_problem
from sgexpand.problem import load_problem

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ytsf_result():
    return solve_problem(load_problem(PROBLEMS / "ytsf.ini"))


@pytest.fixture(scope="session")
def rd_result():
    return solve_problem(load_problem(PROBLEMS / "rd.ini"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
