import numpy as np
import pytest

from corpus import csr


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def triangle_with_tree():
    """Core triangle a-d-e; a carries b (with leaf c) and leaf f.

    Labels: a=0, b=1, c=2, d=3, e=4, f=5.
    """
    return csr([(0, 3), (0, 4), (3, 4), (0, 1), (0, 5), (1, 2)], 6)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
