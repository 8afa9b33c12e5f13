import itertools
import json
import random
import re
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tightpath.digraph import (
    Digraph,
    RDigraph,
    edge_density,
    has_closed_walk,
    is_tight_path,
    longest_walk,
    shift_digraph,
)
from tightpath.errors import InvalidInputError


def random_rdigraph(n, r, p, seed):
    rng = random.Random(seed)
    edges = [e for e in itertools.permutations(range(n), r) if rng.random() < p]
    return RDigraph(n, r, frozenset(edges))


def brute_longest_walk(G, cap):
    """Longest walk by extending walks layer by layer up to `cap` vertices; None if cap is reached.

    Only the last r-1 vertices of each walk are kept, since they alone decide
    how it can continue.
    """
    best = G.r - 1 if G.n else 0
    frontier = {e[1:] for e in G.edges}
    size = G.r
    while frontier:
        best = size
        if size >= cap:
            return None
        frontier = {s[1:] + (v,) for s in frontier for v in range(G.n) if s + (v,) in G.edges}
        size += 1
    return best


def test_rdigraph_validation():
    with pytest.raises(InvalidInputError):
        RDigraph(3, 2, frozenset({(0, 0)}))
    with pytest.raises(InvalidInputError):
        RDigraph(3, 2, frozenset({(0, 5)}))
    with pytest.raises(InvalidInputError):
        RDigraph(3, 2, frozenset({(0, 1, 2)}))


def test_is_tight_path_examples():
    G = RDigraph(4, 3, frozenset({(0, 1, 2), (1, 2, 3)}))
    assert is_tight_path(G, [0, 1, 2, 3])
    assert is_tight_path(G, [0, 1])
    assert not is_tight_path(G, [0, 1, 2, 0])
    assert not is_tight_path(G, [3, 2, 1])


@settings(max_examples=40)
@given(st.integers(3, 5), st.integers(2, 3), st.floats(0.05, 0.5), st.integers(0, 10**6))
def test_longest_walk_matches_brute_force(n, r, p, seed):
    G = random_rdigraph(n, r, p, seed)
    rep = longest_walk(G)
    brute = brute_longest_walk(G, cap=n ** (r - 1) + r + 1)
    if brute is None:
        assert not rep.finite
        w = rep.witness
        cyc = w + w[: r - 1]
        assert all(tuple(cyc[i : i + r]) in G.edges for i in range(len(w)))
    else:
        assert rep.finite and rep.max_walk_size == brute
        if G.edges:
            assert len(rep.witness) == brute
            assert all(tuple(rep.witness[i : i + r]) in G.edges for i in range(brute - r + 1))


@settings(max_examples=40)
@given(st.integers(3, 6), st.floats(0.05, 0.4), st.integers(0, 10**6))
def test_closed_walk_matches_networkx(n, p, seed):
    G = random_rdigraph(n, 3, p, seed)
    H = nx.DiGraph()
    H.add_edges_from((e[:2], e[1:]) for e in G.edges)
    assert has_closed_walk(G) == (not nx.is_directed_acyclic_graph(H))


def test_shift_digraph_shape():
    G = RDigraph(3, 3, frozenset({(0, 1, 2), (1, 2, 0), (2, 0, 1)}))
    S = shift_digraph(G)
    assert S.m == 3 and len(S.arcs) == 3
    assert has_closed_walk(G)
    assert not longest_walk(G).finite


def test_walk_report_without_edges():
    rep = longest_walk(RDigraph(5, 3, frozenset()))
    assert rep.finite and rep.max_walk_size == 2


def test_edge_density_exact():
    G = RDigraph(4, 2, frozenset({(0, 1), (1, 2), (2, 3)}))
    assert edge_density(G) == Fraction(3, 12)
    assert edge_density(RDigraph.complete(5, 3)) == 1


def test_json_round_trip_and_dot():
    G = random_rdigraph(5, 3, 0.3, 1)
    assert RDigraph.from_json(json.loads(json.dumps(G.to_json()))) == G
    D = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 2)])
    assert Digraph.from_json(D.to_json()) == D
    dot = D.to_dot()
    assert dot.startswith("digraph D {") and dot.rstrip().endswith("}")
    assert len(re.findall(r"n\d+ -> n\d+;", dot)) == 3


def test_digraph_longest_walk_on_dag():
    D = Digraph.from_arcs(4, [(0, 1), (1, 2), (0, 3)])
    rep = longest_walk(D)
    assert rep.finite and rep.max_walk_size == 3 and rep.witness == [0, 1, 2]
