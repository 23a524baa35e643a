import random

import pytest
from hypothesis import settings, strategies as st

from afglimm.diagram import BratteliDiagram
from afglimm.presentation import QuotientPresentation

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@st.composite
def diagrams(draw, max_rows=4, max_width=3):
    """Random diagrams where every vertex off the last row has a child."""
    n_rows = draw(st.integers(1, max_rows))
    rows = [draw(st.integers(1, max_width)) for _ in range(n_rows)]
    edges = []
    for k in range(1, n_rows):
        for j in range(1, rows[k - 1] + 1):
            hs = draw(st.sets(st.integers(1, rows[k]), min_size=1))
            edges += [(k, j, h) for h in sorted(hs)]
    return BratteliDiagram(rows, edges)


def chain(H):
    return BratteliDiagram([1] * H, [(k, 1, 1) for k in range(1, H)])


def merging_roots(H=4):
    """Roots (1,1) and (1,2) both feed the chain (2,1), (3,1), ..."""
    return BratteliDiagram([2] + [1] * (H - 1), [(1, 1, 1), (1, 2, 1)] + [(k, 1, 1) for k in range(2, H)])


def two_chains(H=4):
    return BratteliDiagram([2] * H, [(k, j, j) for k in range(1, H) for j in (1, 2)])


def two_blocks(H=5):
    """Block 1 born on row 1 and block 2 on row 2, one cell per row each, no touching."""
    rows = []
    for k in range(1, H + 1):
        row = [("a", 1, None if k == 1 else "a")]
        if k >= 2:
            row.append(("b", 2, None if k == 2 else "b"))
        rows.append(row)
    return QuotientPresentation(rows, [[] for _ in rows], total_blocks=2)


@pytest.fixture
def rng():
    return random.Random(20240601)
