import itertools

import networkx as nx
from hypothesis import strategies as st

from predsearch.graph import Graph


@st.composite
def connected_graphs(draw, min_n=1, max_n=9, weighted=True, integer=False):
    """Random spanning tree plus extra edges, optionally weighted."""
    n = draw(st.integers(min_n, max_n))
    edges = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges[(u, v)] = None
    pairs = list(itertools.combinations(range(n), 2))
    if pairs:
        for p in draw(st.lists(st.sampled_from(pairs), max_size=n)):
            edges[p] = None
    if not weighted:
        ws = st.just(1.0)
    elif integer:
        ws = st.integers(1, 6).map(float)
    else:
        ws = st.floats(0.1, 10.0, allow_nan=False)
    return Graph(n, tuple((u, v, draw(ws)) for u, v in sorted(edges)))


@st.composite
def trees(draw, min_n=1, max_n=12, integer=True):
    n = draw(st.integers(min_n, max_n))
    w = st.integers(1, 5).map(float) if integer else st.floats(0.1, 5.0, allow_nan=False)
    return Graph(n, tuple((draw(st.integers(0, v - 1)), v, draw(w)) for v in range(1, n)))


def to_nx(g: Graph) -> nx.Graph:
    h = nx.DiGraph() if g.directed else nx.Graph()
    h.add_nodes_from(range(g.n))
    for u, v, w in g.edges:
        h.add_edge(u, v, weight=w)
    return h
