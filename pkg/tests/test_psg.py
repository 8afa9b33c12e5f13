import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tightpath.errors import InvalidInputError, UnsupportedError
from tightpath.perms import all_perms, canonical_pattern, forward_shift, parse_perm
from tightpath.psg import (
    Chord,
    ShiftCycle,
    build_psg,
    chorded_shift_cycles,
    cycle_chords,
    is_psg_arc,
    realize_walk,
    second_chord,
    shift_cycles,
    split_cycle,
    totient,
)


@pytest.mark.parametrize("r", range(1, 7))
def test_arcs_match_definition(r):
    D = build_psg(r)
    P = all_perms(r)
    expected = {(i, j) for i, a in enumerate(P) for j, b in enumerate(P) if is_psg_arc(a, b)}
    assert D.arcs == expected
    if r >= 2:
        assert {D.labels[u] for u, v in D.arcs if u == v} == {P[0], P[-1]}


def test_psg4_size():
    D = build_psg(4)
    assert D.m == 24 and len(D.arcs) == 96


def test_psg_out_of_range():
    with pytest.raises(UnsupportedError):
        build_psg(10)


@pytest.mark.parametrize("r", range(2, 7))
def test_shift_cycles_partition(r):
    cycles = shift_cycles(r)
    from math import factorial

    assert len(cycles) == factorial(r - 1)
    seen = [p for C in cycles for p in C.vertices]
    assert sorted(seen) == list(all_perms(r))
    for C in cycles:
        for i in range(r):
            assert C[i + 1] == forward_shift(C[i])
            assert is_psg_arc(C[i], C[i + 1])


def test_shift_cycle_examples():
    assert {frozenset(C.vertices) for C in shift_cycles(3)} == {
        frozenset(map(parse_perm, ["123", "231", "312"])),
        frozenset(map(parse_perm, ["321", "213", "132"])),
    }
    assert [C.vertices for C in shift_cycles(2)] == [((1, 2), (2, 1))]


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_second_chord_exhaustive_and_involutive(r):
    D = build_psg(r)
    for u, v in D.arcs:
        a, b = D.labels[u], D.labels[v]
        v2, u2 = second_chord(a, b)
        assert is_psg_arc(v2, u2)
        assert second_chord(v2, u2) == (a, b)


def test_second_chord_rejects_non_arc():
    with pytest.raises(InvalidInputError):
        second_chord((1, 2, 3), (3, 2, 1))


def test_split_cycle_loop_example():
    C = ShiftCycle.through(parse_perm("1234"))
    loop = next(ch for ch in cycle_chords(C) if ch.from_index == ch.to_index)
    first, second = split_cycle(C, loop)
    assert first == [parse_perm("1234")]
    assert second == [parse_perm(x) for x in ("2341", "3412", "4123")]


def test_split_cycle_rejects_shift_arc():
    C = ShiftCycle.through(parse_perm("1234"))
    with pytest.raises(InvalidInputError):
        split_cycle(C, Chord(0, 1, (C[0], C[1])))
    with pytest.raises(InvalidInputError):
        split_cycle(C, Chord(0, 2, (C[0], C[2])))


def test_unchorded_cycle_has_no_chord():
    # 1324 -> 3241 -> 2413 -> 4132 has no chord, so it stays whole
    C = ShiftCycle.through(parse_perm("1324"))
    assert cycle_chords(C) == []


@pytest.mark.parametrize("r,phi", [(1, 1), (2, 1), (4, 2), (5, 4), (6, 2), (12, 4)])
def test_totient(r, phi):
    assert totient(r) == phi


@pytest.mark.parametrize("r", range(2, 7))
def test_chorded_cycles_are_chords(r):
    for C, ch in chorded_shift_cycles(r):
        assert ch in cycle_chords(C)


@pytest.mark.parametrize("r", [3, 4, 5])
def test_vertices_on_short_cycles(r):
    """Every vertex other than the two looped ones lies on a cycle with r-1 vertices."""
    D = build_psg(r)
    loops = {u for u, v in D.arcs if u == v}
    for s in range(D.m):
        stack = [(s, (s,))]
        found = False
        while stack and not found:
            u, path = stack.pop()
            for v in D.succ[u]:
                if v == s and len(path) == r - 1:
                    found = True
                    break
                if v not in path and len(path) < r - 1:
                    stack.append((v, path + (v,)))
        assert found or s in loops


def test_realize_walk_examples():
    assert realize_walk(3, [(1, 2, 3)]) == [1, 2, 3]
    assert realize_walk(3, [(1, 2, 3)] * 4) == [1, 2, 3, 4, 5, 6]
    with pytest.raises(InvalidInputError):
        realize_walk(3, [(1, 2, 3), (3, 2, 1)])


@settings(max_examples=60)
@given(st.integers(2, 5), st.integers(1, 10), st.integers(0, 10**6))
def test_realize_random_walks(r, t, seed):
    rng = random.Random(seed)
    D = build_psg(r)
    v = rng.randrange(D.m)
    walk = [v]
    for _ in range(t - 1):
        walk.append(rng.choice(D.succ[walk[-1]]))
    perms = [D.labels[x] for x in walk]
    xs = realize_walk(r, perms)
    assert len(xs) == r - 1 + t and sorted(xs) == list(range(1, len(xs) + 1))
    assert [canonical_pattern(xs[j : j + r]) for j in range(t)] == perms
