"""Machine checks for (3,4)-tournament spanning paths and the structural
lemmas behind the f(n,3,4) and f(n,3,3) bounds.

Orientation masks use the pattern ranks of ``perms.all_perms(3)``:
0:123 1:132 2:213 3:231 4:312 5:321.  The classes {123,231,312} and
{132,213,321} are the two cyclic orders of a triple; a tight 3-cycle on a
triple is one whole class.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from itertools import combinations, permutations
from math import comb
from typing import Sequence

import numpy as np

from . import _kernels
from .digraph import RDigraph, is_tight_path, longest_walk, shift_digraph, topological_order
from .errors import AlgorithmFailure, InvalidInputError, PreconditionError, UnsupportedError
from .paths import _trace_back, brute_force_longest, count_spanning_paths, reach_table_for
from .perms import all_perms, canonical_pattern, perm_index
from .tournaments import (
    Tournament,
    as_rdigraph,
    as_tournament,
    construct_first_not_max,
    edge_slots,
    ext_from_masks,
    find_rk_violation,
    random_masks,
    subset_index,
    subsets,
)

log = logging.getLogger(__name__)

CYCLIC_CLASSES = ((0, 3, 4), (1, 2, 5))
MASKS_34 = tuple(m for m in range(64) if bin(m).count("1") == 4)
EXHAUSTIVE_MAX_N = 4
RANDOM_MAX_N = 10
_CHUNK = 20_000


@dataclass
class SearchReport:
    property: str
    n: int
    mode: str
    samples: int
    seed: int | None
    instances_checked: int = 0
    raw_instances: int = 0
    canonical_classes: int | None = None
    counterexample: dict | None = None
    min_spanning_count: int | None = None
    runtime_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict:
        out = asdict(self)
        out["ok"] = self.ok
        return out


# ------------------------------------------------------------ canonical forms


def _transforms(n: int, r: int = 3) -> list[tuple[np.ndarray, np.ndarray]]:
    """For each relabelling (and its reversal) the slot map (c,p) -> (c',p')."""
    subs = subsets(n, r)
    sidx = subset_index(n, r)
    pidx = perm_index(r)
    pats = all_perms(r)
    out = []
    for sigma in permutations(range(n)):
        for rev in (False, True):
            tc = np.empty((len(subs), len(pats)), dtype=np.int64)
            tp = np.empty_like(tc)
            for c, s in enumerate(subs):
                for p, pat in enumerate(pats):
                    e = [sigma[s[x - 1]] for x in pat]
                    if rev:
                        e.reverse()
                    tc[c, p] = sidx[tuple(sorted(e))]
                    tp[c, p] = pidx[canonical_pattern(e)]
            out.append((tc, tp))
    return out


def apply_transform(masks: np.ndarray, transform: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    masks = np.atleast_2d(np.asarray(masks, dtype=np.int64))
    tc, tp = transform
    new = np.zeros_like(masks)
    for c in range(tc.shape[0]):
        for p in range(tc.shape[1]):
            new[:, tc[c, p]] |= ((masks[:, c] >> p) & 1) << tp[c, p]
    return new


def canonical_codes(n: int, masks: np.ndarray) -> np.ndarray:
    """Least packed code over all relabellings and reversal (6 bits per triple)."""
    masks = np.atleast_2d(np.asarray(masks, dtype=np.int64))
    if comb(n, 3) * 6 > 62:
        raise UnsupportedError("packed canonical codes need C(n,3) <= 10")
    shifts = np.arange(masks.shape[1], dtype=np.int64) * 6
    best = None
    for tr in _transforms(n):
        code = (apply_transform(masks, tr) << shifts).sum(axis=1)
        best = code if best is None else np.minimum(best, code)
    return best


def find_isomorphism(A: Tournament, B: Tournament) -> tuple[tuple[int, ...], bool] | None:
    """(sigma, reversed) mapping A onto B by brute force, or None."""
    if (A.n, A.r) != (B.n, B.r):
        return None
    target = B.rdigraph.edges
    for sigma in permutations(range(A.n)):
        for rev in (False, True):
            img = {tuple(sigma[v] for v in (e[::-1] if rev else e)) for e in A.edges()}
            if img == target:
                return sigma, rev
    return None


# ------------------------------------------------------------ verification


def reverify_no_spanning(obj: dict) -> bool:
    """Independent check from serialized JSON: True when no spanning path exists."""
    G = RDigraph.from_json(obj)
    return brute_force_longest(G) < G.n


def _masks_to_json(n: int, masks: Sequence[int]) -> dict:
    return Tournament(n, 3, tuple(int(m) for m in masks)).to_json()


def _ext_acyclic(n: int, ext: np.ndarray) -> bool:
    """No closed walk: the shift digraph on ordered pairs is acyclic."""
    indeg = np.zeros(n * n, dtype=np.int64)
    succ = [[] for _ in range(n * n)]
    for idx in np.nonzero(ext)[0]:
        e = int(ext[idx])
        base = (int(idx) % n) * n
        while e:
            low = e & -e
            j = base + low.bit_length() - 1
            succ[idx].append(j)
            indeg[j] += 1
            e ^= low
    stack = [i for i in range(n * n) if indeg[i] == 0]
    seen = 0
    while stack:
        i = stack.pop()
        seen += 1
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                stack.append(j)
    return seen == n * n


def _spanning_flags(n: int, masks: np.ndarray) -> np.ndarray:
    out = np.empty(masks.shape[0], dtype=bool)
    for lo in range(0, masks.shape[0], _CHUNK):
        chunk = masks[lo : lo + _CHUNK]
        out[lo : lo + _CHUNK] = _kernels.spanning_exists_batch(n, 2, ext_from_masks(n, 3, chunk))
    return out


def _min_spanning(n: int, masks: np.ndarray, limit: int = 2000) -> int | None:
    if masks.shape[0] == 0:
        return None
    ext = ext_from_masks(n, 3, masks[:limit])
    return min(int(_kernels.count_table(n, 2, e)[(1 << n) - 1].sum()) for e in ext)


def _first_counterexample(n: int, masks: np.ndarray, flags: np.ndarray) -> dict | None:
    for i in np.nonzero(~flags)[0]:
        obj = _masks_to_json(n, masks[i])
        if reverify_no_spanning(obj):
            return obj
        raise AlgorithmFailure(f"kernel and brute force disagree on instance {i}")
    return None


def _validate(n: int, mode: str, samples: int) -> None:
    if n < 3:
        raise InvalidInputError("need n >= 3")
    if mode == "exhaustive":
        if n > EXHAUSTIVE_MAX_N:
            raise UnsupportedError(
                f"exhaustive search is limited to n <= {EXHAUSTIVE_MAX_N}: n=5 already has "
                "15^10 raw orientations; larger n is only covered by random sampling"
            )
    elif mode == "random":
        if n > RANDOM_MAX_N:
            raise UnsupportedError(f"random mode supports n <= {RANDOM_MAX_N}")
        if samples < 1:
            raise InvalidInputError("samples must be positive")
    else:
        raise InvalidInputError(f"unknown mode {mode!r}")


def _all_masks(n: int) -> np.ndarray:
    c = comb(n, 3)
    choice = np.array(MASKS_34, dtype=np.int64)
    grid = np.indices((len(choice),) * c).reshape(c, -1).T
    return choice[grid]


def _exhaustive(n: int, acyclic: bool, report: SearchReport) -> None:
    masks = _all_masks(n)
    report.raw_instances = masks.shape[0]
    codes = canonical_codes(n, masks)
    _, first = np.unique(codes, return_index=True)
    reps = masks[np.sort(first)]
    if acyclic:
        ext = ext_from_masks(n, 3, reps)
        keep = np.array([_ext_acyclic(n, e) for e in ext], dtype=bool)
        reps = reps[keep]
    report.canonical_classes = reps.shape[0]
    report.instances_checked = reps.shape[0]
    flags = _spanning_flags(n, reps)
    report.counterexample = _first_counterexample(n, reps, flags)
    report.min_spanning_count = _min_spanning(n, reps)


def sample_closed_walk_free(n: int, samples: int, rng: np.random.Generator, thin: int = 8) -> np.ndarray:
    """Closed-walk-free (3,4)-tournaments by a Metropolis walk.

    The chain starts at a random relabelling of construct_first_not_max and
    proposes replacing one triple's mask; proposals creating a closed walk
    are rejected.  One sample is recorded every `thin` proposals.
    """
    start = construct_first_not_max(n, 3).relabel([int(x) for x in rng.permutation(n)])
    state = np.array(start.masks, dtype=np.int64)
    code, last = edge_slots(n, 3)
    ext = ext_from_masks(n, 3, state)[0]
    out = np.empty((samples, state.size), dtype=np.int64)
    choice = np.array(MASKS_34, dtype=np.int64)
    for s in range(samples):
        for _ in range(thin):
            c = int(rng.integers(state.size))
            new = int(choice[rng.integers(len(choice))])
            old = int(state[c])
            if new == old:
                continue
            trial = ext.copy()
            for p in range(6):
                bit = np.int64(1) << last[c, p]
                trial[code[c, p]] &= ~bit
                if (new >> p) & 1:
                    trial[code[c, p]] |= bit
            if _ext_acyclic(n, trial):
                state[c] = new
                ext = trial
        out[s] = state
    return out


def check_34(n: int, mode: str = "random", seed: int = 0, samples: int = 1000, acyclic: bool = False) -> SearchReport:
    """Search for a (3,4)-tournament on n vertices without a spanning tight path."""
    _validate(n, mode, samples)
    prop = "34-acyclic" if acyclic else "34-spanning"
    report = SearchReport(prop, n, mode, samples if mode == "random" else 0, seed if mode == "random" else None)
    t0 = time.perf_counter()
    if mode == "exhaustive":
        _exhaustive(n, acyclic, report)
    else:
        rng = np.random.default_rng(seed)
        if acyclic:
            masks = sample_closed_walk_free(n, samples, rng)
        else:
            masks = np.concatenate(
                [random_masks(n, 3, 4, min(_CHUNK, samples - lo), rng) for lo in range(0, samples, _CHUNK)]
            )
        report.raw_instances = report.instances_checked = masks.shape[0]
        flags = _spanning_flags(n, masks)
        report.counterexample = _first_counterexample(n, masks, flags)
        report.min_spanning_count = _min_spanning(n, masks)
    report.runtime_s = round(time.perf_counter() - t0, 3)
    log.info("%s n=%d %s: %d instances, ok=%s", prop, n, mode, report.instances_checked, report.ok)
    return report


def check_34_acyclic(n: int, mode: str = "random", seed: int = 0, samples: int = 1000) -> SearchReport:
    return check_34(n, mode, seed, samples, acyclic=True)


# ------------------------------------------------------------ triangle-free (3,4)


def triangle_violation(G: RDigraph | Tournament) -> tuple[int, ...] | None:
    """A triple whose cyclic classes are not both of size two, else None."""
    T = as_tournament(G)
    if T.r != 3:
        raise InvalidInputError("needs r = 3")
    for s, m in zip(subsets(T.n, 3), T.masks):
        for cls in CYCLIC_CLASSES:
            if sum((m >> p) & 1 for p in cls) != 2:
                return s
    return None


def random_triangle_free_34(n: int, seed: int | np.random.Generator = 0) -> Tournament:
    """Uniform over triangle-free (3,4)-tournaments: drop one edge per cyclic class."""
    rng = np.random.default_rng(seed)
    masks = []
    for _ in range(comb(n, 3)):
        m = 0
        for cls in CYCLIC_CLASSES:
            drop = cls[rng.integers(3)]
            for p in cls:
                if p != drop:
                    m |= 1 << p
        masks.append(m)
    return Tournament(n, 3, tuple(masks))


def _out_edges(E, A, B):
    """Pairs (j, j') with (a_j, a_{j+1}, b_{j'}) in E and j' in {j, j+1} (0-based)."""
    t = len(A)
    found = []
    for j in range(t - 1):
        for jp in (j, j + 1):
            if jp < t and (A[j], A[j + 1], B[jp]) in E:
                found.append((j, jp))
    return found


def merge_disjoint_paths(G: RDigraph | Tournament, A: Sequence[int], B: Sequence[int]) -> list[int]:
    """A tight path on more than t vertices from two disjoint t-vertex paths.

    G must be a triangle-free (3,4)-tournament.  With an out edge
    (a_j, a_{j+1}, b_{j'}) chosen to maximise j and then j', the path
    a_1..a_{j+1} b_{j'}..b_t works (roles swap for out edges from B).
    Without out edges the interleaving a_t b_t a_{t-1} b_{t-1} ... a_1 b_1 does.
    """
    Gr = as_rdigraph(G)
    A, B = list(A), list(B)
    if len(A) != len(B) or set(A) & set(B):
        raise InvalidInputError("paths must be disjoint and of equal size")
    E = Gr.edges
    t = len(A)
    # the extremal out edge is tried first; the rest only guard against
    # tournaments where that single choice happens to break the tail
    candidates = []
    for X, Y in ((A, B), (B, A)):
        for j, jp in sorted(_out_edges(E, X, Y), reverse=True):
            candidates.append(X[: j + 2] + Y[jp:])
    candidates.append([v for pair in zip(A[::-1], B[::-1]) for v in pair])
    valid = [Q for Q in candidates if len(Q) > t and is_tight_path(Gr, Q)]
    if not valid:
        raise AlgorithmFailure("repair did not produce a longer tight path; is G triangle-free (3,4)?")
    Q = max(valid, key=len)
    return Q


@dataclass(frozen=True)
class IntersectionReport:
    ok: bool
    max_size: int
    max_vertex_sets: int
    disjoint_pair: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    longer_path: tuple[int, ...] | None = None


def _require_triangle_free_34(G) -> None:
    k, bad = find_rk_violation(G)
    if k != 4:
        where = f" at triple {bad}" if bad is not None else ""
        raise PreconditionError(f"not a (3,4)-tournament{where}")
    bad = triangle_violation(G)
    if bad is not None:
        raise PreconditionError(f"triple {bad} carries a tight 3-cycle")


def check_pairwise_intersecting(G: RDigraph | Tournament) -> IntersectionReport:
    """Whether all maximum tight paths pairwise share a vertex.

    Maximum paths are grouped by vertex set (intersection only depends on
    those).  A disjoint pair would be merged into a longer path, which
    contradicts maximality; such a report has ok=False.
    """
    if as_rdigraph(G).r != 3:
        raise PreconditionError("needs r = 3")
    _require_triangle_free_34(G)
    T = as_tournament(G)
    n = T.n
    if n > 9:
        raise UnsupportedError("maximum-path enumeration supports n <= 9")
    reach = reach_table_for(T)
    full = reach.any(axis=1)
    pops = _kernels._popcounts(n)
    best = int(pops[full].max())
    sets = [int(m) for m in np.nonzero(full & (pops == best))[0]]
    for i, m1 in enumerate(sets):
        for m2 in sets[i + 1 :]:
            if m1 & m2 == 0:
                ext = T.ext_table()
                A = _trace_back(n, 2, ext, reach, m1, int(np.nonzero(reach[m1])[0][0]))
                B = _trace_back(n, 2, ext, reach, m2, int(np.nonzero(reach[m2])[0][0]))
                Q = merge_disjoint_paths(T, A, B)
                return IntersectionReport(False, best, len(sets), (tuple(A), tuple(B)), tuple(Q))
    return IntersectionReport(True, best, len(sets))


def long_path_triangle_free(G: RDigraph | Tournament, s: int) -> list[int]:
    """A tight path on s vertices in a triangle-free (3,4)-tournament with >= s^2 vertices.

    Recursively finds an (s-1)-path Q, then an (s-1)-path in G - V(Q), and
    merges the two disjoint paths.
    """
    Gr = as_rdigraph(G)
    _require_triangle_free_34(Gr)
    if Gr.n < s * s:
        raise PreconditionError(f"needs at least {s * s} vertices")
    return _long_path(Gr, list(range(Gr.n)), s)


def _long_path(G: RDigraph, verts: list[int], s: int) -> list[int]:
    if s <= 1:
        return verts[:s]
    Q = _long_path(G, verts, s - 1)
    rest = [v for v in verts if v not in Q]
    Q2 = _long_path(G, rest, s - 1)
    return merge_disjoint_paths(G, Q[: s - 1], Q2[: s - 1])[:s]


# ------------------------------------------------------------ (3,3) coloring


@dataclass(frozen=True)
class Coloring:
    colors: dict[tuple[int, int], tuple[int, int]]
    longest_walk_size: int
    num_colors: int
    monochromatic_triangle: tuple[int, int, int] | None

    @property
    def ok(self) -> bool:
        return self.monochromatic_triangle is None


def walk_length_coloring(G: RDigraph | Tournament) -> Coloring:
    """Color the pair u<v by the longest walk lengths ending in (u,v) and (v,u).

    Length counts edges, so a walk of size w has length w-2.  In a
    closed-walk-free (3,3)-tournament no triangle is monochromatic.
    """
    Gr = as_rdigraph(G)
    if Gr.r != 3:
        raise InvalidInputError("needs r = 3")
    S = shift_digraph(Gr)
    order = topological_order(S)
    if order is None:
        raise PreconditionError("G has a closed walk, so walk lengths are unbounded")
    depth = [0] * S.m
    for v in order:
        for w in S.succ[v]:
            depth[w] = max(depth[w], depth[v] + 1)
    ending = {S.labels[v]: depth[v] for v in range(S.m)}
    colors = {(u, v): (ending.get((u, v), 0), ending.get((v, u), 0)) for u, v in combinations(range(Gr.n), 2)}
    mono = None
    for u, v, w in combinations(range(Gr.n), 3):
        if colors[(u, v)] == colors[(u, w)] == colors[(v, w)]:
            mono = (u, v, w)
            break
    rep = longest_walk(Gr)
    return Coloring(colors, rep.max_walk_size, len(set(colors.values())), mono)


__all__ = [
    "Coloring",
    "IntersectionReport",
    "SearchReport",
    "canonical_codes",
    "check_34",
    "check_34_acyclic",
    "check_pairwise_intersecting",
    "count_spanning_paths",
    "find_isomorphism",
    "long_path_triangle_free",
    "merge_disjoint_paths",
    "random_triangle_free_34",
    "reverify_no_spanning",
    "sample_closed_walk_free",
    "walk_length_coloring",
]
