"""Vertex-disjoint cycle families: the generic shift-cycle family, bundled
optimal families for PSG_4 and PSG_5, and a seeded local search.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from .digraph import Digraph, is_cycle
from .errors import InvalidInputError, UnsupportedError
from .perms import parse_perm, perm_str
from .psg import build_psg, chorded_shift_cycles, cycle_chords, shift_cycles, split_cycle


@dataclass(frozen=True)
class CycleFamily:
    """Pairwise vertex-disjoint directed cycles, as vertex-id tuples."""

    cycles: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)

    def vertices(self) -> set[int]:
        return {v for c in self.cycles for v in c}

    def length_counts(self, up_to: int | None = None) -> tuple[int, ...]:
        cnt = Counter(len(c) for c in self.cycles)
        top = up_to if up_to is not None else max(cnt, default=0)
        return tuple(cnt.get(L, 0) for L in range(1, top + 1))

    def problems(self, D: Digraph) -> list[str]:
        """Violated invariants against D; empty when the family is valid."""
        out = []
        seen: dict[int, int] = {}
        for ci, c in enumerate(self.cycles):
            if any(not 0 <= v < D.m for v in c):
                out.append(f"cycle {ci} has a vertex outside 0..{D.m - 1}")
                continue
            if not is_cycle(D, c):
                out.append(f"cycle {ci} is not a directed cycle of the digraph")
            for v in c:
                if v in seen:
                    out.append(f"cycles {seen[v]} and {ci} share vertex {_name(D, v)}")
                seen.setdefault(v, ci)
        return out

    def to_json(self, D: Digraph | None = None) -> list[list]:
        return [[_name(D, v) for v in c] for c in self.cycles]

    @classmethod
    def from_json(cls, obj: Sequence[Sequence], D: Digraph | None = None) -> CycleFamily:
        return cls(tuple(tuple(resolve_vertex(D, x) for x in c) for c in obj))


def _name(D: Digraph | None, v: int):
    if D is None or D.labels is None:
        return v
    lab = D.labels[v]
    return perm_str(lab) if isinstance(lab, tuple) else lab


def resolve_vertex(D: Digraph | None, x) -> int:
    """Vertex id from an int or, for permutation-labelled digraphs, a perm string."""
    if isinstance(x, str):
        if D is None or D.labels is None:
            raise InvalidInputError(f"vertex {x!r} given by name but the digraph is unlabelled")
        return D.vertex(parse_perm(x))
    if isinstance(x, (list, tuple)):
        if D is None:
            raise InvalidInputError(f"vertex {x!r} given by label but no digraph supplied")
        return D.vertex(tuple(int(v) for v in x))
    return int(x)


# ------------------------------------------------------------ constructions


def disjoint_cycle_family(r: int, bundled: bool = False) -> CycleFamily:
    """Shift cycles, with every chorded one split in two.

    The result has (r-1)! + phi(r) cycles.  With `bundled=True` and r in
    {4, 5} the shipped optimal families (10 and 36 cycles) are returned.
    """
    if bundled:
        if r not in BUNDLED_FAMILIES:
            raise UnsupportedError(f"no bundled family for r={r}")
        return bundled_family(r)
    if not 2 <= r <= 6:
        raise UnsupportedError(f"generic family supported for 2 <= r <= 6, got r={r}")
    D = build_psg(r)
    chorded = {C.vertices: ch for C, ch in chorded_shift_cycles(r)}
    cycles = []
    for C in shift_cycles(r):
        # chorded_shift_cycles starts each cycle elsewhere; match by rotation
        key = next((k for k in chorded if set(k) == set(C.vertices)), None)
        if key is None:
            cycles.append(tuple(D.vertex(p) for p in C.vertices))
            continue
        C2 = next(c for c, _ in chorded_shift_cycles(r) if c.vertices == key)
        for part in split_cycle(C2, chorded[key]):
            cycles.append(tuple(D.vertex(p) for p in part))
    return CycleFamily(tuple(cycles))


BUNDLED_FAMILIES = {4: "psg4_family.json", 5: "psg5_family.json"}


def data_path(name: str):
    return resources.files("tightpath") / "data" / name


def load_data(name: str) -> dict:
    return json.loads(data_path(name).read_text(encoding="utf-8"))


def bundled_family(r: int) -> CycleFamily:
    obj = load_data(BUNDLED_FAMILIES[r])
    return CycleFamily.from_json(obj["cycles"], build_psg(r))


# ------------------------------------------------------------ search


def iter_simple_cycles(D: Digraph, max_len: int) -> Iterable[tuple[int, ...]]:
    """Every simple cycle with at most max_len vertices, once, smallest vertex first."""
    for s in range(D.m):
        if s in D.succ_sets[s]:
            yield (s,)
        stack = [(s, [s], iter(D.succ[s]))]
        on_path = {s}
        while stack:
            u, path, it = stack[-1]
            advanced = False
            for v in it:
                if v == s and len(path) > 1:
                    yield tuple(path)
                elif v > s and v not in on_path and len(path) < max_len:
                    on_path.add(v)
                    stack.append((v, path + [v], iter(D.succ[v])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                on_path.discard(u)


def _generic_initial(D: Digraph) -> CycleFamily | None:
    if D.labels is None or not D.labels or not isinstance(D.labels[0], tuple):
        return None
    r = len(D.labels[0])
    if not 2 <= r <= 6:
        return None
    P = build_psg(r)
    if P != D or tuple(P.labels) != tuple(D.labels):
        return None
    return disjoint_cycle_family(r)


def search_disjoint_cycle_family(
    D: Digraph,
    seed: int = 0,
    budget: int = 2000,
    max_len: int = 5,
    initial: CycleFamily | None = None,
) -> CycleFamily:
    """Iterated local search for a large family of disjoint cycles.

    The pool is every simple cycle up to `max_len` plus the cycles of the
    starting family.  One iteration forces a random pool cycle in (dropping
    the chosen cycles it meets), refills greedily with short cycles first,
    and keeps the move unless the family shrank.  `budget` counts iterations;
    the best family seen is returned and it is always valid.
    """
    rng = random.Random(seed)
    if initial is None:
        initial = _generic_initial(D)
    pool = list(iter_simple_cycles(D, max_len))
    if initial is not None:
        extra = set(pool)
        pool += [c for c in initial.cycles if c not in extra]
    if not pool:
        return CycleFamily(())
    pool.sort(key=lambda c: (len(c), c))
    touching: list[list[int]] = [[] for _ in range(D.m)]
    for ci, c in enumerate(pool):
        for v in c:
            touching[v].append(ci)
    index = {c: i for i, c in enumerate(pool)}

    owner = [-1] * D.m
    chosen: set[int] = set()

    def add(ci):
        chosen.add(ci)
        for v in pool[ci]:
            owner[v] = ci

    def drop(ci):
        chosen.discard(ci)
        for v in pool[ci]:
            owner[v] = -1

    def fits(ci):
        return all(owner[v] < 0 for v in pool[ci])

    def refill(cands):
        cands = sorted(set(cands), key=lambda ci: (len(pool[ci]), rng.random()))
        for ci in cands:
            if fits(ci):
                add(ci)

    if initial is not None:
        for c in initial.cycles:
            add(index[c])
    refill(range(len(pool)))
    best = set(chosen)

    for _ in range(budget):
        ci = rng.randrange(len(pool))
        if ci in chosen:
            continue
        before = set(chosen)
        freed = set()
        for v in pool[ci]:
            if owner[v] >= 0:
                freed.update(pool[owner[v]])
                drop(owner[v])
        add(ci)
        refill(cj for v in freed for cj in touching[v])
        if len(chosen) < len(before) and rng.random() > 0.05:
            for cj in list(chosen):
                drop(cj)
            for cj in before:
                add(cj)
        elif len(chosen) > len(best):
            best = set(chosen)
    return CycleFamily(tuple(pool[ci] for ci in sorted(best, key=lambda ci: (len(pool[ci]), pool[ci]))))


__all__ = [
    "CycleFamily",
    "bundled_family",
    "cycle_chords",
    "disjoint_cycle_family",
    "iter_simple_cycles",
    "load_data",
    "resolve_vertex",
    "search_disjoint_cycle_family",
]
