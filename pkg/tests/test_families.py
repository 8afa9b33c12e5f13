from math import factorial

import pytest

from tightpath.errors import UnsupportedError
from tightpath.families import (
    CycleFamily,
    bundled_family,
    disjoint_cycle_family,
    iter_simple_cycles,
    search_disjoint_cycle_family,
)
from tightpath.digraph import Digraph
from tightpath.psg import build_psg, totient


@pytest.mark.parametrize("r", range(2, 7))
def test_generic_family_size_and_validity(r):
    fam = disjoint_cycle_family(r)
    assert len(fam) == factorial(r - 1) + totient(r)
    assert fam.problems(build_psg(r)) == []


def test_bundled_families():
    f4, f5 = bundled_family(4), bundled_family(5)
    assert len(f4) == 10 and f4.problems(build_psg(4)) == []
    assert f4.length_counts() == (2, 4, 2, 2)
    assert len(f5) == 36 and f5.length_counts() == (2, 6, 8, 18, 2)
    assert disjoint_cycle_family(5, bundled=True) == f5
    with pytest.raises(UnsupportedError):
        disjoint_cycle_family(6, bundled=True)


def test_search_reaches_known_optima():
    assert len(search_disjoint_cycle_family(build_psg(4), seed=0, budget=2000)) == 10
    fam = search_disjoint_cycle_family(build_psg(5), seed=1, budget=3000)
    assert len(fam) == 36 and fam.problems(build_psg(5)) == []


def test_search_is_deterministic_per_seed():
    D = build_psg(4)
    assert search_disjoint_cycle_family(D, seed=3, budget=300) == search_disjoint_cycle_family(D, seed=3, budget=300)


def test_problems_reports_overlap_and_non_cycles():
    D = build_psg(3)
    fam = CycleFamily(((0,), (0,), (1, 3)))
    probs = fam.problems(D)
    assert any("share vertex" in p for p in probs)
    assert any("not a directed cycle" in p for p in probs)


def test_json_round_trip():
    D = build_psg(5)
    fam = bundled_family(5)
    assert CycleFamily.from_json(fam.to_json(D), D) == fam


def test_simple_cycle_enumeration_counts():
    D = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0), (1, 0), (2, 2)])
    cycles = set(iter_simple_cycles(D, 3))
    assert cycles == {(0, 1, 2), (0, 1), (2,)}
