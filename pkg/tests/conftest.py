import numpy as np
import pytest

from liebracket.field import make_prime_context
from liebracket.sl2 import Sl2Element


@pytest.fixture
def ctx11():
    return make_prime_context(11)


@pytest.fixture
def pair11():
    # the worked example over F_11
    return Sl2Element.from_matrix([[7, 5], [2, 4]], 11), Sl2Element.from_matrix([[8, 8], [10, 3]], 11)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: [int(t) if t.isdigit() else t for t in s.split()[1].split("(")]):
            terminalreporter.write_line(line)
