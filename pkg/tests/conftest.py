import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA_LINES: list = []


@pytest.fixture
def criterion_log():
    """Collects one summary line per acceptance criterion (printed at session end)."""

    def log(line: str) -> None:
        print(line)
        _CRITERIA_LINES.append(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
