import random

import pytest
from hypothesis import strategies as st

from histwalk.graph import Graph

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def connected_graphs(draw, min_nodes=3, max_nodes=12, max_extra=20):
    """Random connected graph: a random spanning tree plus extra edges."""
    n = draw(st.integers(min_nodes, max_nodes))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    edges = [(i, p) for i, p in zip(range(1, n), parents)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_extra))
    return Graph.from_edges(n, edges + extra)


def random_connected_graph(rng: random.Random, n: int, extra: int) -> Graph:
    edges = [(i, rng.randrange(i)) for i in range(1, n)]
    edges += [(rng.randrange(n), rng.randrange(n)) for _ in range(extra)]
    return Graph.from_edges(n, edges)


@pytest.fixture
def star():
    from histwalk.graph import gen_star

    return gen_star(3)
