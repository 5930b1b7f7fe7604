import time

import pytest

from rabi2.series import ModelParams

ACCEPTANCE_LINES: list[str] = []
_SESSION_START = time.perf_counter()


@pytest.fixture
def defaults():
    return ModelParams("1/10", 1, "7/10")


@pytest.fixture
def acceptance_lines():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
