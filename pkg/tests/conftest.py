import numpy as np
import pytest

from rwr_topk.graph import graph_from_edges


def two_cycle():
    return graph_from_edges(2, [(0, 1, 1.0), (1, 0, 1.0)])


def two_triangles():
    edges = []
    for base in (0, 3):
        for u in range(3):
            for v in range(3):
                if u != v:
                    edges.append((base + u, base + v, 1.0))
    return graph_from_edges(6, edges)


def clique(n, base=0):
    return [
        (base + u, base + v, 1.0)
        for u in range(n)
        for v in range(n)
        if u != v
    ]


@pytest.fixture
def cycle_graph():
    return two_cycle()


@pytest.fixture
def triangles_graph():
    return two_triangles()
