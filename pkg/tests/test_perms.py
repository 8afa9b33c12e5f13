import pytest
from hypothesis import given
from hypothesis import strategies as st

from tightpath.errors import InvalidInputError
from tightpath.perms import (
    all_perms,
    backward_shift,
    canonical_pattern,
    forward_shift,
    parse_perm,
    pattern_match,
    perm_rank,
    perm_str,
    perm_unrank,
    reverse,
)

distinct = st.lists(st.integers(-1000, 1000), min_size=1, max_size=9, unique=True)


@given(distinct)
def test_canonical_pattern_is_order_isomorphic(a):
    p = canonical_pattern(a)
    assert sorted(p) == list(range(1, len(a) + 1))
    for i in range(len(a)):
        for j in range(len(a)):
            assert (a[i] < a[j]) == (p[i] < p[j])


@given(distinct, st.integers(1, 50))
def test_pattern_match_invariant_under_monotone_maps(a, c):
    b = [c * x + 7 for x in a]
    assert pattern_match(a, b)
    assert pattern_match(a, reverse(b)) == (len(a) == 1)


def test_pattern_examples():
    assert canonical_pattern([10, 30, 20]) == (1, 3, 2)
    assert canonical_pattern([5]) == (1,)
    with pytest.raises(InvalidInputError):
        pattern_match([1, 2], [1, 2, 3])


@given(st.integers(1, 7).flatmap(lambda r: st.tuples(st.just(r), st.integers(0, 5039))))
def test_rank_round_trip(args):
    r, k = args
    from math import factorial

    k %= factorial(r)
    p = perm_unrank(r, k)
    assert perm_rank(p) == k
    assert all_perms(r)[k] == p


def test_all_perms_lexicographic():
    ps = all_perms(4)
    assert len(ps) == 24 and list(ps) == sorted(ps)


@given(st.permutations(list(range(1, 8))))
def test_shifts_are_inverse(p):
    p = tuple(p)
    assert backward_shift(forward_shift(p)) == p
    assert forward_shift(p) == p[1:] + p[:1]


def test_perm_strings():
    assert perm_str((1, 3, 2)) == "132"
    assert parse_perm("132") == (1, 3, 2)
    assert parse_perm(perm_str(tuple(range(10, 0, -1)))) == tuple(range(10, 0, -1))
