"""The pattern-shift graph PSG_r and its shift-cycle structure.

Vertices are the r! permutations of [r] indexed by lexicographic rank; there
is an arc a -> b when the (r-1)-suffix of a and the (r-1)-prefix of b are
order isomorphic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, gcd
from typing import Iterator, Sequence

import numpy as np

from .digraph import Digraph
from .errors import InvalidInputError, UnsupportedError
from .perms import (
    Perm,
    all_perms,
    backward_shift,
    canonical_pattern,
    forward_shift,
    perm_index,
)

MAX_R = 9


def _lehmer_ranks(v: np.ndarray) -> np.ndarray:
    r = v.shape[-1]
    rank = np.zeros(v.shape[:-1], dtype=np.int64)
    for a in range(r):
        smaller = (v[..., a + 1 :] < v[..., a : a + 1]).sum(axis=-1)
        rank += smaller * factorial(r - 1 - a)
    return rank


@lru_cache(maxsize=4)
def psg_successor_table(r: int) -> np.ndarray:
    """(r!, r) array: row u holds the ranks of the r out-neighbours of u, sorted."""
    if not 1 <= r <= MAX_R:
        raise UnsupportedError(f"PSG_r is materialised for 1 <= r <= {MAX_R}, got r={r}")
    P = np.array(all_perms(r), dtype=np.int8).reshape(-1, r)
    if r == 1:
        return np.zeros((1, 1), dtype=np.int32)
    # suffix pattern: drop u1, close the gap it leaves in the values
    suf = P[:, 1:] - (P[:, 1:] > P[:, :1])
    out = np.empty((P.shape[0], r), dtype=np.int64)
    for x in range(1, r + 1):
        v = np.concatenate([suf + (suf >= x), np.full((P.shape[0], 1), x, dtype=np.int8)], axis=1)
        out[:, x - 1] = _lehmer_ranks(v)
    out.sort(axis=1)
    out = out.astype(np.int32)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=4)
def build_psg(r: int) -> Digraph:
    """PSG_r as a Digraph whose labels are the permutations (rank order)."""
    table = psg_successor_table(r)
    succ = tuple(map(tuple, table.tolist()))
    return Digraph(len(succ), succ, all_perms(r))


def iter_psg_arcs(r: int) -> Iterator[tuple[int, int]]:
    for u, row in enumerate(psg_successor_table(r)):
        for v in row:
            yield u, int(v)


def is_psg_arc(u: Sequence[int], v: Sequence[int]) -> bool:
    """Direct test of the defining condition, independent of any table."""
    if len(u) != len(v):
        return False
    if len(u) == 1:
        return True
    return canonical_pattern(u[1:]) == canonical_pattern(v[:-1])


def totient(r: int) -> int:
    return sum(1 for d in range(1, r + 1) if gcd(d, r) == 1)


@dataclass(frozen=True)
class ShiftCycle:
    """u_0 -> u_1 -> ... -> u_{r-1} -> u_0 with u_{i+1} the forward shift of u_i."""

    vertices: tuple[Perm, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def __getitem__(self, i: int) -> Perm:
        return self.vertices[i % len(self.vertices)]

    @classmethod
    def through(cls, p: Sequence[int]) -> ShiftCycle:
        vs = [tuple(p)]
        for _ in range(len(p) - 1):
            vs.append(forward_shift(vs[-1]))
        return cls(tuple(vs))


@dataclass(frozen=True)
class Chord:
    from_index: int
    to_index: int
    arc: tuple[Perm, Perm]


def shift_cycles(r: int) -> list[ShiftCycle]:
    """The (r-1)! shift cycles, each started at its rotation beginning with 1."""
    if r < 2:
        raise UnsupportedError("shift cycles need r >= 2")
    return [ShiftCycle.through(p) for p in all_perms(r) if p[0] == 1]


def second_chord(u: Sequence[int], v: Sequence[int]) -> tuple[Perm, Perm]:
    """For an arc u -> v return (v', u') = (backward(v), forward(u)), again an arc."""
    u, v = tuple(u), tuple(v)
    if not is_psg_arc(u, v):
        raise InvalidInputError(f"{u} -> {v} is not an arc of PSG_{len(u)}")
    return backward_shift(v), forward_shift(u)


def cycle_chords(C: ShiftCycle) -> list[Chord]:
    """Every chord or loop of C, found by scanning all ordered index pairs."""
    r = len(C)
    out = []
    for i in range(r):
        for j in range(r):
            if j == (i + 1) % r:
                continue
            if is_psg_arc(C[i], C[j]):
                out.append(Chord(i, j, (C[i], C[j])))
    return out


def split_cycle(C: ShiftCycle, chord: Chord) -> tuple[list[Perm], list[Perm]]:
    """Split C along u_i -> u_j and its second chord u_{j-1} -> u_{i+1}.

    The first cycle runs u_j, u_{j+1}, ..., u_i and closes with the chord; the
    second runs u_{i+1}, ..., u_{j-1} and closes with the second chord.
    """
    r = len(C)
    i, j = chord.from_index % r, chord.to_index % r
    if j == (i + 1) % r:
        raise InvalidInputError("a shift arc is not a chord")
    if chord.arc != (C[i], C[j]) or not is_psg_arc(C[i], C[j]):
        raise InvalidInputError(f"{chord} is not a chord of the cycle")
    first = [C[j + s] for s in range((i - j) % r + 1)]
    second = [C[i + 1 + s] for s in range((j - 1 - (i + 1)) % r + 1)]
    return first, second


def chorded_shift_cycles(r: int) -> list[tuple[ShiftCycle, Chord]]:
    """One shift cycle per d coprime to r, with the chord u_{d'} -> u_1.

    The cycle starts at x with x_s = d*s mod r (0-based s, residue 0 written
    as r) and d' is the inverse of d mod r.
    """
    if r < 2:
        raise UnsupportedError("chorded shift cycles need r >= 2")
    out = []
    for d in range(1, r + 1):
        if gcd(d, r) != 1:
            continue
        x = tuple((d * s) % r or r for s in range(r))
        C = ShiftCycle.through(x)
        dinv = pow(d, -1, r) if r > 1 else 0
        chord = Chord(dinv, 1, (C[dinv], C[1]))
        out.append((C, chord))
    return out


def realize_walk(r: int, walk: Sequence[Sequence[int]]) -> list[int]:
    """Distinct integers x_1..x_{r-1+t} whose r-windows have patterns walk_1..walk_t.

    Values are kept as even integers before each insertion so the new value
    can sit at an odd slot strictly inside the required gap; the result is
    compressed to 1..m at the end.
    """
    walk = [tuple(w) for w in walk]
    if not walk:
        raise InvalidInputError("walk must contain at least one vertex")
    for w in walk:
        if len(w) != r or sorted(w) != list(range(1, r + 1)):
            raise InvalidInputError(f"{w} is not a permutation of [{r}]")
    for a, b in zip(walk, walk[1:]):
        if not is_psg_arc(a, b):
            raise InvalidInputError(f"{a} -> {b} is not an arc of PSG_{r}")
    xs = list(walk[0])
    for w in walk[1:]:
        xs = [2 * x for x in xs]
        window = sorted(xs[len(xs) - (r - 1) :])
        c = w[-1]
        if c == 1:
            new = window[0] - 1
        elif c == r:
            new = window[-1] + 1
        else:
            new = window[c - 2] + 1
        xs.append(new)
    ranks = {v: i + 1 for i, v in enumerate(sorted(xs))}
    return [ranks[v] for v in xs]


def psg_vertex_ids(r: int, perms) -> list[int]:
    idx = perm_index(r)
    try:
        return [idx[tuple(p)] for p in perms]
    except KeyError as exc:
        raise InvalidInputError(f"{exc.args[0]} is not a permutation of [{r}]") from None
