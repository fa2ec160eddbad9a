import time
from contextlib import contextmanager

import pytest
from hypothesis import strategies as st

from sidon_poisson.construction import Construction, ConstructionParams

# Two small explicit constructions; every height used at a work stage stays
# well under 5000 floors.
TINY_A = [(2, (1, 2)), (2, (0, 3)), (3, (1, 0, 4)), (2, (2, 9)), (2, (0, 20)), (3, (1, 2, 30)), (2, (5, 60))]
TINY_B = [(3, (0, 1, 2)), (2, (2, 3)), (2, (1, 4)), (3, (0, 2, 7)), (2, (3, 15)), (2, (1, 40)), (2, (0, 90))]


@pytest.fixture(scope="session")
def paper():
    return Construction(ConstructionParams.paper(11))


@pytest.fixture(scope="session")
def tiny_a():
    return Construction(ConstructionParams.explicit(TINY_A))


@pytest.fixture(scope="session")
def tiny_b():
    return Construction(ConstructionParams.explicit(TINY_B))


def level_lists(h: int, min_size: int = 0):
    return st.lists(st.integers(0, h - 1), min_size=min_size, max_size=h, unique=True)


def level_sets(con: Construction, stage: int, min_size: int = 0):
    h = con.height(stage)
    return level_lists(h, min_size).map(lambda ls: con.from_levels(stage, ls))


_RESULTS: list[tuple[str, bool, float]] = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion: name, pass/fail and wall time."""

    @contextmanager
    def run(label: str):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            _RESULTS.append((label, ok, time.perf_counter() - start))

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, secs in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  ({secs:.2f}s)")
