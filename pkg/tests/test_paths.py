import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tightpath.digraph import RDigraph, has_closed_walk, is_tight_path, longest_walk
from tightpath.errors import InvalidInputError, PreconditionError
from tightpath.paths import (
    PathSearchOptions,
    brute_force_longest,
    count_spanning_paths,
    extract_bounded_walk_subgraph,
    longest_tight_path_exact,
    min_degree_subgraph,
    path_from_cycles,
    spanning_path_35,
    spanning_path_flexible,
    tight_r_cycles,
)
from tightpath.tournaments import (
    construct_binary_33,
    construct_from_pattern_set,
    construct_max_second,
    random_tournament,
)


def random_rdigraph(n, r, p, seed):
    rng = random.Random(seed)
    return RDigraph(n, r, frozenset(e for e in itertools.permutations(range(n), r) if rng.random() < p))


def brute_count_spanning(G):
    return sum(1 for p in itertools.permutations(range(G.n)) if is_tight_path(G, p))


def test_examples():
    assert longest_tight_path_exact(RDigraph.complete(6, 3)).size == 6
    assert longest_tight_path_exact(construct_max_second(8, 3)).size == 3


def test_two_pattern_tournament():
    # 132 and 231 never chain, so no tight path has two consecutive edges
    T = construct_from_pattern_set(10, 3, [(1, 3, 2), (2, 3, 1)])
    res = longest_tight_path_exact(T)
    assert res.size == 3 == brute_force_longest(T.rdigraph)


@settings(max_examples=40)
@given(st.integers(3, 8), st.integers(0, 6), st.integers(0, 10**6))
def test_exact_matches_enumeration_r3(n, k, seed):
    T = random_tournament(n, 3, k, seed)
    res = longest_tight_path_exact(T)
    assert res.optimal
    assert res.size == brute_force_longest(T.rdigraph)
    assert is_tight_path(T.rdigraph, res.path) and len(res.path) == res.size


@settings(max_examples=30)
@given(st.integers(2, 6), st.integers(2, 4), st.floats(0.05, 0.6), st.integers(0, 10**6))
def test_exact_matches_enumeration_general(n, r, p, seed):
    G = random_rdigraph(n, r, p, seed)
    res = longest_tight_path_exact(G)
    assert res.size == brute_force_longest(G)
    assert is_tight_path(G, res.path)


def test_degenerate_cases():
    assert longest_tight_path_exact(RDigraph(2, 3, frozenset())).size == 2
    G1 = RDigraph(4, 1, frozenset({(0,), (2,)}))
    assert longest_tight_path_exact(G1).size == 2


def test_state_cap_flags_non_optimal():
    T = random_tournament(9, 3, 4, 0)
    res = longest_tight_path_exact(T, PathSearchOptions(state_cap=100))
    assert not res.optimal and is_tight_path(T.rdigraph, res.path)
    heur = longest_tight_path_exact(T, PathSearchOptions(mode="heuristic", seed=1))
    assert is_tight_path(T.rdigraph, heur.path)
    with pytest.raises(InvalidInputError):
        longest_tight_path_exact(T, PathSearchOptions(mode="fast"))


@pytest.mark.parametrize("seed", range(8))
def test_count_spanning_matches_enumeration(seed):
    T = random_tournament(6, 3, 3 + seed % 3, seed)
    c = count_spanning_paths(T)
    assert c == brute_count_spanning(T.rdigraph)
    assert (c > 0) == (longest_tight_path_exact(T).size == 6)


def test_count_small_cases():
    assert count_spanning_paths(RDigraph.complete(6, 3)) == 720
    assert count_spanning_paths(construct_max_second(5, 3)) == 0
    assert count_spanning_paths(RDigraph(2, 3, frozenset())) == 2


# ------------------------------------------------------------ min degree


def test_min_degree_single_edge():
    verts, edges = min_degree_subgraph([0, 1, 2], [(0, 1, 2)])
    assert verts == [0, 1, 2] and edges == [(0, 1, 2)]


def test_min_degree_peels_isolated_first():
    verts, edges = min_degree_subgraph([9, 0, 1, 2, 3], [(0, 1, 2), (1, 2, 3), (0, 2, 3), (0, 1, 3)])
    assert 9 not in verts and len(edges) == 4


@pytest.mark.parametrize("seed", range(50))
def test_min_degree_property(seed):
    rng = random.Random(seed)
    n = rng.randint(5, 12)
    edges = [e for e in itertools.combinations(range(n), 3) if rng.random() < 0.3] or [(0, 1, 2)]
    avg = Fraction(3 * len(edges), n)
    verts, kept = min_degree_subgraph(range(n), edges)
    assert verts
    deg = {v: sum(1 for e in kept if v in e) for v in verts}
    assert min(deg.values()) > avg / 3
    assert all(set(e) <= set(verts) for e in kept)


def test_min_degree_precondition():
    with pytest.raises(PreconditionError):
        min_degree_subgraph([0, 1, 2, 3], [(0, 1, 2)], d=3)


# ------------------------------------------------------------ cycles to paths


def test_path_from_cycles_complete():
    G = RDigraph.complete(6, 3)
    assert len(tight_r_cycles(G)) == 40
    res = path_from_cycles(G)
    assert res.cycles == 40 and len(res.path) >= 4 and is_tight_path(G, res.path)


def test_path_from_single_cycle():
    G = RDigraph(3, 3, frozenset({(0, 1, 2), (1, 2, 0), (2, 0, 1)}))
    assert len(path_from_cycles(G).path) == 3


def test_path_from_cycles_needs_a_cycle():
    with pytest.raises(PreconditionError):
        path_from_cycles(construct_max_second(6, 3).rdigraph)


# ------------------------------------------------------------ (3,5) insertion


def test_span35_small_and_shuffled():
    for seed in range(20):
        T = random_tournament(3, 3, 5, seed)
        p = spanning_path_35(T)
        assert tuple(p) in T.rdigraph.edges
    rng = random.Random(0)
    for seed in range(30):
        T = random_tournament(10, 3, 5, seed)
        order = list(range(10))
        rng.shuffle(order)
        p = spanning_path_35(T, order=order, check=True)
        assert sorted(p) == list(range(10)) and is_tight_path(T.rdigraph, p)


def test_span35_rejects_other_k():
    with pytest.raises(PreconditionError):
        spanning_path_35(random_tournament(6, 3, 4, 0))


# ------------------------------------------------------------ flexible paths


def test_flexible_complete_cases():
    for G in (RDigraph.complete(7, 3), RDigraph.complete(8, 4)):
        res = spanning_path_flexible(G)
        assert res.success and len(res.path) == G.n and is_tight_path(G, res.path)


def test_flexible_refuses_small_k():
    with pytest.raises(PreconditionError):
        spanning_path_flexible(random_tournament(8, 4, 22, 0))
    with pytest.raises(PreconditionError):
        spanning_path_flexible(random_tournament(7, 3, 5, 0))


def test_flexible_r4_k23_n9():
    for seed in range(20):
        T = random_tournament(9, 4, 23, seed)
        res = spanning_path_flexible(T)
        assert res.success and is_tight_path(T.rdigraph, res.path) and len(res.path) == 9


# ------------------------------------------------------------ bounded walks


def test_extract_max_second():
    res = extract_bounded_walk_subgraph(construct_max_second(8, 3), 3)
    assert longest_walk(res.graph).max_walk_size <= 3


def test_extract_without_edges():
    res = extract_bounded_walk_subgraph(RDigraph(5, 3, frozenset()), 2)
    assert res.vertices == tuple(range(5))


@pytest.mark.parametrize("seed", range(12))
def test_extract_closed_walk_free(seed):
    n = 6 + seed % 4
    T = random_tournament(n, 3, 4, seed)
    res = extract_bounded_walk_subgraph(T)
    assert not has_closed_walk(res.graph)
    s = longest_tight_path_exact(T).size
    assert longest_walk(res.graph).max_walk_size <= max(2, s)


def test_extract_precondition():
    with pytest.raises(PreconditionError):
        extract_bounded_walk_subgraph(RDigraph.complete(5, 3), 3)


def test_extract_binary33():
    res = extract_bounded_walk_subgraph(construct_binary_33(2))
    assert not has_closed_walk(res.graph)
