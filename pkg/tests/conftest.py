import random

import pytest

from capcover import Instance, WeightedGraph

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_connected_graph(rng: random.Random, n: int, extra: float = 0.3, wmax: float = 10.0):
    edges = {}
    for v in range(1, n):
        u = rng.randrange(v)
        edges[(u, v)] = round(rng.uniform(0.5, wmax), 3)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra:
                edges[(u, v)] = round(rng.uniform(0.5, wmax), 3)
    return WeightedGraph.from_edges(n, [(u, v, w) for (u, v), w in edges.items()])


@pytest.fixture
def path4():
    """Unit path 0-1-2-3."""
    return WeightedGraph.from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])


@pytest.fixture
def star4():
    """Centre 0 with unit spokes to 1, 2, 3."""
    return WeightedGraph.from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])


def instance(graph, k, lam, roots=None):
    return Instance(graph, k, lam, roots)
