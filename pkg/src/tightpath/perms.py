"""Permutations of [r] in one-line notation and order-isomorphism helpers.

A permutation is a plain tuple holding each of 1..r once.  Ranks are
lexicographic and 0-based, which is also the order `itertools.permutations`
produces from a sorted input.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Sequence

from .errors import InvalidInputError

Perm = tuple[int, ...]


def canonical_pattern(a: Sequence[int]) -> Perm:
    """Return the permutation of [len(a)] that is order isomorphic to `a`."""
    if len(a) == 0:
        raise InvalidInputError("canonical pattern of an empty list is undefined")
    if len(set(a)) != len(a):
        raise InvalidInputError(f"entries are not distinct: {tuple(a)!r}")
    order = sorted(range(len(a)), key=a.__getitem__)
    out = [0] * len(a)
    for rank, pos in enumerate(order, start=1):
        out[pos] = rank
    return tuple(out)


def pattern_match(a: Sequence[int], b: Sequence[int]) -> bool:
    """True iff a_i < a_j exactly when b_i < b_j, for all i < j."""
    if len(a) != len(b):
        raise InvalidInputError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        return True
    return canonical_pattern(a) == canonical_pattern(b)


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(1, len(p) + 1))


@lru_cache(maxsize=16)
def all_perms(r: int) -> tuple[Perm, ...]:
    """All permutations of [r] in lexicographic (rank) order."""
    return tuple(permutations(range(1, r + 1)))


@lru_cache(maxsize=16)
def perm_index(r: int) -> dict[Perm, int]:
    return {p: i for i, p in enumerate(all_perms(r))}


def perm_rank(p: Sequence[int]) -> int:
    """Lexicographic rank via the Lehmer code."""
    r = len(p)
    rank = 0
    for i in range(r):
        smaller = sum(1 for j in range(i + 1, r) if p[j] < p[i])
        rank += smaller * factorial(r - 1 - i)
    return rank


def perm_unrank(r: int, rank: int) -> Perm:
    if not 0 <= rank < factorial(r):
        raise InvalidInputError(f"rank {rank} out of range for r={r}")
    pool = list(range(1, r + 1))
    out = []
    for i in range(r - 1, -1, -1):
        q, rank = divmod(rank, factorial(i))
        out.append(pool.pop(q))
    return tuple(out)


def forward_shift(p: Sequence[int]) -> Perm:
    """(a1, ..., ar) -> (a2, ..., ar, a1)."""
    return tuple(p[1:]) + (p[0],)


def backward_shift(p: Sequence[int]) -> Perm:
    """(a1, ..., ar) -> (ar, a1, ..., a_{r-1})."""
    return (p[-1],) + tuple(p[:-1])


def reverse(p: Sequence[int]) -> Perm:
    return tuple(reversed(p))


def identity(r: int) -> Perm:
    return tuple(range(1, r + 1))


def perm_str(p: Sequence[int]) -> str:
    if len(p) <= 9:
        return "".join(str(x) for x in p)
    return ",".join(str(x) for x in p)


def parse_perm(s: str | Sequence[int]) -> Perm:
    """Parse "3142", "10,2,..." or an int sequence into a checked permutation."""
    if isinstance(s, str):
        vals = [int(x) for x in s.split(",")] if "," in s else [int(c) for c in s]
    else:
        vals = [int(x) for x in s]
    if not is_permutation(vals):
        raise InvalidInputError(f"not a permutation of [{len(vals)}]: {s!r}")
    return tuple(vals)


def pattern_of_tuple(order: Sequence[int], subset: Sequence[int]) -> Perm:
    """Canonical pattern of `order`, an arrangement of the sorted `subset`."""
    pos = {v: i + 1 for i, v in enumerate(subset)}
    return tuple(pos[v] for v in order)


def arrange(subset: Sequence[int], pattern: Sequence[int]) -> tuple[int, ...]:
    """The ordering of sorted `subset` whose canonical pattern is `pattern`."""
    return tuple(subset[x - 1] for x in pattern)
