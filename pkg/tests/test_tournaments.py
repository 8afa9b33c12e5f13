import itertools
from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tightpath.digraph import RDigraph, edge_density, has_closed_walk
from tightpath.errors import InvalidInputError, UnsupportedError
from tightpath.paths import brute_force_longest, longest_tight_path_exact
from tightpath.perms import canonical_pattern
from tightpath.tournaments import (
    Tournament,
    binary33_contains,
    construct_binary_33,
    construct_cycle_sharpness,
    construct_first_not_max,
    construct_from_pattern_set,
    construct_interval_density,
    construct_max_second,
    construct_middle_not_max,
    ext_from_masks,
    find_rk_violation,
    interval_density_bound,
    is_rk_tournament,
    random_masks,
    random_tournament,
)


def test_pattern_set_tournament():
    T = construct_from_pattern_set(5, 3, [(1, 3, 2), (2, 3, 1)])
    assert is_rk_tournament(T) == 2
    for e in T.edges():
        assert canonical_pattern(e) in {(1, 3, 2), (2, 3, 1)}
    with pytest.raises(InvalidInputError):
        construct_from_pattern_set(5, 3, [(1, 1, 2)])


@pytest.mark.parametrize("n,r,k", [(6, 3, 2), (6, 4, 8), (7, 5, 40)])
def test_max_second_k(n, r, k):
    assert is_rk_tournament(construct_max_second(n, r)) == k == factorial(r) // 3


def test_first_not_max():
    assert is_rk_tournament(construct_first_not_max(6, 4)) == 18
    for n in range(3, 8):
        T = construct_first_not_max(n, 3)
        assert is_rk_tournament(T) == 4 and not has_closed_walk(T.rdigraph)


def test_middle_not_max():
    T = construct_middle_not_max(6)
    assert is_rk_tournament(T) == 4
    assert all(e[1] != max(e) for e in T.edges())


def test_violation_reporting():
    G = RDigraph(4, 3, frozenset({(0, 1, 2)}))
    k, bad = find_rk_violation(G)
    assert k is None and bad == (0, 1, 3)
    assert is_rk_tournament(RDigraph(2, 3, frozenset())) is None


@pytest.mark.parametrize("t", [2, 3, 4])
def test_binary33_predicate_matches_materialisation(t):
    T = construct_binary_33(t)
    assert is_rk_tournament(T) == 3
    n = 2**t
    for e in itertools.permutations(range(n), 3):
        assert T.has_edge(e) == binary33_contains(*e, t)


def test_binary33_small_paths():
    for t in (2, 3):
        T = construct_binary_33(t)
        assert brute_force_longest(T.rdigraph) == longest_tight_path_exact(T).size <= 2 * t + 4


def test_interval_density():
    G = construct_interval_density(12, 3, 3)
    assert len(G.edges) == 688
    assert edge_density(G) > interval_density_bound(3, 3)
    assert longest_tight_path_exact(G).size <= 6
    with pytest.raises(InvalidInputError):
        construct_interval_density(10, 3, 3)


@pytest.mark.parametrize("n,r", [(6, 3), (8, 3), (7, 4)])
def test_cycle_sharpness(n, r):
    inst = construct_cycle_sharpness(n, r)
    G = inst.graph
    for s in itertools.combinations(range(n), r):
        cyc = [e for e in itertools.permutations(s) if all(tuple(e[i:] + e[:i]) in G.edges for i in range(r))]
        assert len(cyc) == r  # one tight r-cycle, listed from each of its r starting points
    assert longest_tight_path_exact(G).size <= inst.path_bound()
    with pytest.raises(UnsupportedError):
        construct_cycle_sharpness(8, 5)


@settings(max_examples=30)
@given(st.integers(3, 7), st.integers(0, 6), st.integers(0, 10**6))
def test_random_tournament_and_round_trip(n, k, seed):
    T = random_tournament(n, 3, k, seed)
    assert is_rk_tournament(T) == k
    assert Tournament.from_rdigraph(T.rdigraph) == T
    assert np.array_equal(T.ext_table(), T.rdigraph.ext_table())


def test_random_masks_shape_and_popcount():
    rng = np.random.default_rng(0)
    M = random_masks(6, 3, 4, 50, rng)
    assert M.shape == (50, comb(6, 3))
    assert {bin(int(x)).count("1") for x in M.ravel()} == {4}
    ext = ext_from_masks(6, 3, M[:3])
    for i in range(3):
        assert np.array_equal(ext[i], Tournament(6, 3, tuple(M[i].tolist())).ext_table())


def test_relabel_is_isomorphism():
    T = random_tournament(6, 3, 3, 5)
    perm = [3, 0, 5, 1, 4, 2]
    U = T.relabel(perm)
    assert {tuple(perm[v] for v in e) for e in T.edges()} == set(U.edges())
