import random

import networkx as nx
import pytest

from zxpivot.graphstate import SimpleGraph


def atlas_connected_graphs(max_vertices: int, min_vertices: int = 1) -> list[SimpleGraph]:
    """All connected graphs up to isomorphism with the given vertex range."""
    out = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n < min_vertices or n > max_vertices:
            continue
        if n and not nx.is_connected(g):
            continue
        if n == 0:
            continue
        labels = [chr(ord("a") + i) for i in g.nodes()]
        edges = [(chr(ord("a") + a), chr(ord("a") + b)) for a, b in g.edges()]
        out.append(SimpleGraph(labels, edges))
    return out


def random_connected_graph(n: int, rng: random.Random, p: float = 0.5) -> SimpleGraph:
    labels = [chr(ord("a") + i) for i in range(n)]
    while True:
        edges = [
            (labels[i], labels[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < p
        ]
        g = SimpleGraph(labels, edges)
        if g.is_connected():
            return g


@pytest.fixture(scope="session")
def atlas6():
    return atlas_connected_graphs(6)


@pytest.fixture(scope="session")
def atlas5():
    return atlas_connected_graphs(5)


@pytest.fixture
def rng():
    return random.Random(20130712)
