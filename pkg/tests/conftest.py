import numpy as np
import pytest

from csbf import Frame, MassFunction

TERNARY_MASSES = {"x": 0.2, "y": 0.1, "x,y": 0.4, "y,z": 0.3}

#: One line per acceptance criterion, echoed after the run (see test_acceptance).
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


@pytest.fixture
def ternary_frame():
    return Frame(("x", "y", "z"))


@pytest.fixture
def ternary(ternary_frame):
    """The worked ternary example used throughout the suite."""
    return MassFunction.from_labels(ternary_frame, TERNARY_MASSES)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def frame_of_size(n: int) -> Frame:
    labels = ("x", "y", "z", "w", "v", "u", "t", "s")
    return Frame(labels[:n])
