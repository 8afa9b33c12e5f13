import itertools

import numpy as np
import pytest

from tightpath.conjectures import (
    MASKS_34,
    _all_masks,
    _transforms,
    apply_transform,
    canonical_codes,
    check_34,
    check_34_acyclic,
    check_pairwise_intersecting,
    find_isomorphism,
    long_path_triangle_free,
    merge_disjoint_paths,
    random_triangle_free_34,
    reverify_no_spanning,
    sample_closed_walk_free,
    triangle_violation,
    walk_length_coloring,
)
from tightpath.digraph import RDigraph, has_closed_walk, is_tight_path, longest_walk
from tightpath.errors import PreconditionError, UnsupportedError
from tightpath.paths import count_spanning_paths, extract_bounded_walk_subgraph, longest_tight_path_exact
from tightpath.tournaments import (
    Tournament,
    construct_binary_33,
    construct_first_not_max,
    construct_max_second,
    is_rk_tournament,
    random_tournament,
)


def test_check34_n3_trivial():
    rep = check_34(3, "random", seed=0, samples=100)
    assert rep.ok and rep.instances_checked == 100


def test_check34_exhaustive_counts():
    rep = check_34(4, "exhaustive")
    assert rep.raw_instances == 15**4 == _all_masks(4).shape[0]
    assert rep.ok and rep.canonical_classes == 1122
    assert rep.to_json()["ok"] is True


def test_check34_refuses_large_exhaustive():
    with pytest.raises(UnsupportedError):
        check_34(5, "exhaustive")
    with pytest.raises(UnsupportedError):
        check_34(11, "random")


def test_check34_acyclic_exhaustive_and_random():
    rep = check_34_acyclic(4, "exhaustive")
    assert rep.ok and rep.canonical_classes > 0
    rep = check_34_acyclic(6, "random", seed=3, samples=300)
    assert rep.ok and rep.instances_checked == 300


def test_closed_walk_free_sampler():
    rng = np.random.default_rng(1)
    masks = sample_closed_walk_free(6, 40, rng)
    for m in masks:
        T = Tournament(6, 3, tuple(m.tolist()))
        assert is_rk_tournament(T) == 4
        assert not has_closed_walk(T.rdigraph)


def test_first_not_max_spans():
    for n in range(3, 10):
        T = construct_first_not_max(n, 3)
        assert longest_tight_path_exact(T).size == n


def test_random_check_is_seeded():
    a = check_34(6, "random", seed=9, samples=500).to_json()
    b = check_34(6, "random", seed=9, samples=500).to_json()
    a.pop("runtime_s"), b.pop("runtime_s")
    assert a == b


def test_canonical_form_soundness():
    rng = np.random.default_rng(11)
    trs = _transforms(4)
    choice = np.array(MASKS_34)
    for _ in range(1000):
        A = choice[rng.integers(15, size=4)]
        B = apply_transform(A, trs[rng.integers(len(trs))])[0]
        ca, cb = canonical_codes(4, np.stack([A, B]))
        assert ca == cb
        TA, TB = Tournament(4, 3, tuple(A.tolist())), Tournament(4, 3, tuple(B.tolist()))
        assert find_isomorphism(TA, TB) is not None


def test_canonical_form_separates_non_isomorphic():
    rng = np.random.default_rng(5)
    choice = np.array(MASKS_34)
    for _ in range(200):
        A, B = choice[rng.integers(15, size=(2, 4))]
        ca, cb = canonical_codes(4, np.stack([A, B]))
        iso = find_isomorphism(Tournament(4, 3, tuple(A.tolist())), Tournament(4, 3, tuple(B.tolist())))
        assert (ca == cb) == (iso is not None)


def test_reverify_uses_serialized_form():
    assert reverify_no_spanning(construct_max_second(5, 3).to_json())
    assert not reverify_no_spanning(construct_first_not_max(5, 3).to_json())


@pytest.mark.parametrize("seed", range(10))
def test_count_positive_iff_spanning(seed):
    T = random_tournament(7, 3, 3 + seed % 2, seed)
    assert (count_spanning_paths(T) > 0) == (longest_tight_path_exact(T).size == 7)


# ------------------------------------------------------------ triangle-free


def test_triangle_free_sampler_structure():
    for seed in range(20):
        T = random_triangle_free_34(6, seed)
        assert is_rk_tournament(T) == 4 and triangle_violation(T) is None
        for s in itertools.combinations(range(6), 3):
            u, v, w = s
            assert not all(T.has_edge(e) for e in ((u, v, w), (v, w, u), (w, u, v)))
            assert not all(T.has_edge(e) for e in ((w, v, u), (v, u, w), (u, w, v)))


@pytest.mark.parametrize("seed", range(50))
def test_pairwise_intersecting(seed):
    n = 3 + seed % 6
    rep = check_pairwise_intersecting(random_triangle_free_34(n, seed))
    assert rep.ok and rep.max_vertex_sets >= 1


def test_pairwise_precondition_names_triple():
    T = random_triangle_free_34(5, 0)
    masks = (0b011001 | (T.masks[0] & 0b000110),) + T.masks[1:]
    with pytest.raises(PreconditionError, match="triple"):
        check_pairwise_intersecting(Tournament(5, 3, masks))
    with pytest.raises(PreconditionError):
        check_pairwise_intersecting(random_tournament(5, 3, 3, 0))


def test_longpath_s2_any_four_vertices():
    for seed in range(10):
        T = random_triangle_free_34(4, seed)
        p = long_path_triangle_free(T, 2)
        assert len(p) == 2


def test_longpath_on_closed_walk_free_instances():
    rng = np.random.default_rng(2)
    for m in sample_closed_walk_free(9, 10, rng, thin=20):
        T = Tournament(9, 3, tuple(m.tolist()))
        p = long_path_triangle_free(T, 3)
        assert len(p) == 3 and is_tight_path(T.rdigraph, p)


def test_merge_disjoint_paths_grows():
    found = 0
    for seed in range(40):
        T = random_triangle_free_34(8, seed)
        G = T.rdigraph
        paths3 = [p for p in itertools.permutations(range(8), 3) if p in G.edges]
        for A in paths3[:5]:
            B = next((q for q in paths3 if not set(q) & set(A)), None)
            if B is None:
                continue
            Q = merge_disjoint_paths(G, A, B)
            assert len(Q) > 3 and is_tight_path(G, Q)
            found += 1
    assert found > 0


# ------------------------------------------------------------ coloring


def test_coloring_binary33_subgraph():
    sub = extract_bounded_walk_subgraph(construct_binary_33(2)).graph
    col = walk_length_coloring(sub)
    assert col.ok


def test_coloring_on_closed_walk_free_33():
    hits = 0
    for seed in range(200):
        T = random_tournament(5, 3, 3, seed)
        if has_closed_walk(T.rdigraph):
            continue
        hits += 1
        col = walk_length_coloring(T)
        assert col.ok
        s = longest_walk(T.rdigraph).max_walk_size
        assert col.num_colors <= s * s
    assert hits > 0


def test_coloring_three_vertices():
    G = RDigraph(3, 3, frozenset({(0, 1, 2), (2, 1, 0), (1, 0, 2)}))
    col = walk_length_coloring(G)
    assert col.ok == (len(set(col.colors.values())) > 1)


def test_coloring_refuses_closed_walk():
    G = RDigraph(3, 3, frozenset({(0, 1, 2), (1, 2, 0), (2, 0, 1)}))
    with pytest.raises(PreconditionError):
        walk_length_coloring(G)
