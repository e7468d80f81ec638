import itertools

import pytest
from hypothesis import strategies as st

from flipsmooth.flip_engine import FlipStep, FlipTrace
from flipsmooth.graph_core import WeightAssignment, cut_weight, from_edge_list


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return from_edge_list(n, chosen)


@st.composite
def weighted_graphs(draw, max_n=10):
    g = draw(graphs(max_n))
    ws = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=g.m, max_size=g.m))
    cut = draw(st.lists(st.integers(0, 1), min_size=g.n, max_size=g.n))
    return g, WeightAssignment(tuple(ws)), tuple(cut)


def synthetic_trace(g, w, initial, nodes):
    """Trace flipping ``nodes`` in order; gains are from-scratch cut weight differences."""
    side = list(initial)
    steps = []
    for t, v in enumerate(nodes, 1):
        before = cut_weight(g, w, side)
        side[v] ^= 1
        after = cut_weight(g, w, side)
        steps.append(FlipStep(t, v, after - before, after))
    return FlipTrace(tuple(initial), steps, final=tuple(side))


@pytest.fixture
def triangle():
    g = from_edge_list(3, [(0, 1), (1, 2), (0, 2)])
    return g, WeightAssignment((0.5, 0.8, -0.25))


ACCEPTANCE_LINES = []


def acceptance_line(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
