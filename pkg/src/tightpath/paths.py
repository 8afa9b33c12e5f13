"""Exact longest tight paths and the constructive path-finding procedures.

The exact solver runs a bitmask dynamic program over states (vertex set of
the path, ordered last r-1 vertices); see ``_kernels`` for the encoding.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .digraph import RDigraph, falling, is_tight_path, longest_walk
from .errors import AlgorithmFailure, InvalidInputError, PreconditionError, ResourceLimitError
from .tournaments import Tournament, as_rdigraph, is_rk_tournament

log = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 1 << 26


@dataclass(frozen=True)
class PathSearchOptions:
    mode: str = "exact"  # "exact" or "heuristic"
    time_budget_ms: int | None = None
    state_cap: int = DEFAULT_STATE_CAP
    seed: int = 0


@dataclass(frozen=True)
class PathResult:
    size: int
    path: tuple[int, ...]
    optimal: bool


def _ext_and_n(G: RDigraph | Tournament) -> tuple[np.ndarray, int, int]:
    if isinstance(G, Tournament):
        return G.ext_table(), G.n, G.r
    return G.ext_table(), G.n, G.r


def _states(n: int, r: int) -> int:
    return (1 << n) * n ** (r - 1)


def reach_table_for(G: RDigraph | Tournament, state_cap: int = DEFAULT_STATE_CAP) -> np.ndarray:
    if G.r < 2:
        raise InvalidInputError("the path kernels need r >= 2")
    if _states(G.n, G.r) > state_cap:
        raise ResourceLimitError(f"{_states(G.n, G.r)} DP states exceeds cap {state_cap}")
    ext, n, r = _ext_and_n(G)
    return _kernels.reach_table(n, r - 1, ext)


def _trace_back(n: int, k: int, ext: np.ndarray, reach: np.ndarray, mask: int, idx: int) -> list[int]:
    """Recover one tight path with vertex set `mask` ending in state `idx`."""
    tail = list(_kernels.decode(idx, n, k))
    path_rev = []
    while bin(mask).count("1") > k:
        last = tail[-1]
        prev_mask = mask & ~(1 << last)
        for x in range(n):
            if not (prev_mask >> x) & 1 or x in tail[:-1]:
                continue
            prev = [x] + tail[:-1]
            pidx = _kernels.encode(prev, n)
            if reach[prev_mask, pidx] and (ext[pidx] >> last) & 1:
                break
        else:  # pragma: no cover - the table guarantees a predecessor
            raise AlgorithmFailure("reach table has no predecessor state")
        path_rev.append(last)
        mask, tail = prev_mask, prev
    return tail + path_rev[::-1]


def _exact(G: RDigraph | Tournament, cap: int) -> PathResult:
    n, r = G.n, G.r
    if r == 1:
        Gr = as_rdigraph(G)
        verts = sorted(e[0] for e in Gr.edges)
        return PathResult(len(verts), tuple(verts), True)
    k = r - 1
    if n <= k:
        return PathResult(n, tuple(range(n)), True)
    ext, _, _ = _ext_and_n(G)
    reach = reach_table_for(G, cap)
    any_state = reach.any(axis=1)
    masks = np.nonzero(any_state)[0]
    pops = _kernels._popcounts(n)[masks]
    best = int(pops.max())
    mask = int(masks[pops == best].min())
    idx = int(np.nonzero(reach[mask])[0][0])
    path = _trace_back(n, k, ext, reach, mask, idx)
    return PathResult(best, tuple(path), True)


def _heuristic(G: RDigraph | Tournament, opts: PathSearchOptions) -> PathResult:
    """Seeded randomised greedy extension with restarts, both directions."""
    Gr = as_rdigraph(G)
    n, r = Gr.n, Gr.r
    if n < r or not Gr.edges:
        size = min(n, r - 1)
        return PathResult(size, tuple(range(size)), False)
    rng = random.Random(opts.seed)
    out_of: dict[tuple, list[int]] = {}
    into: dict[tuple, list[int]] = {}
    for e in Gr.sorted_edges:
        out_of.setdefault(e[:-1], []).append(e[-1])
        into.setdefault(e[1:], []).append(e[0])
    edges = Gr.sorted_edges
    deadline = None if opts.time_budget_ms is None else time.monotonic() + opts.time_budget_ms / 1000
    best: list[int] = list(edges[0])
    tries = 0
    while True:
        tries += 1
        path = list(rng.choice(edges))
        used = set(path)
        grew = True
        while grew:
            grew = False
            fwd = [w for w in out_of.get(tuple(path[-(r - 1):]), ()) if w not in used]
            if fwd:
                w = rng.choice(fwd)
                path.append(w)
                used.add(w)
                grew = True
            back = [w for w in into.get(tuple(path[: r - 1]), ()) if w not in used]
            if back:
                w = rng.choice(back)
                path.insert(0, w)
                used.add(w)
                grew = True
        if len(path) > len(best):
            best = path
        if len(best) == n:
            break
        if deadline is None and tries >= 200:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
    return PathResult(len(best), tuple(best), len(best) == n)


def longest_tight_path_exact(G: RDigraph | Tournament, opts: PathSearchOptions | None = None) -> PathResult:
    """Maximum tight path with a witness.

    Exact mode returns optimal=True or, when the state space is over the cap,
    falls back to the heuristic and reports optimal=False.
    """
    opts = opts or PathSearchOptions()
    if opts.mode == "heuristic":
        return _heuristic(G, opts)
    if opts.mode != "exact":
        raise InvalidInputError(f"unknown mode {opts.mode!r}")
    try:
        return _exact(G, opts.state_cap)
    except ResourceLimitError as exc:
        log.warning("exact search refused (%s); returning a heuristic path", exc)
        res = _heuristic(G, opts)
        return PathResult(res.size, res.path, False)


def longest_tight_path_size(G: RDigraph | Tournament) -> int:
    return longest_tight_path_exact(G).size


def count_spanning_paths(G: RDigraph | Tournament) -> int:
    """Number of spanning tight paths, counted as vertex sequences."""
    n, r = G.n, G.r
    if r < 2:
        raise InvalidInputError("counting needs r >= 2")
    if n <= r - 1:
        return factorial(n)
    if n > 14:
        raise ResourceLimitError(f"spanning-path counting supports n <= 14, got {n}")
    ext, _, _ = _ext_and_n(G)
    cnt = _kernels.count_table(n, r - 1, ext)
    return int(cnt[(1 << n) - 1].sum())


def brute_force_longest(G: RDigraph) -> int:
    """Longest tight path by trying every sequence of distinct vertices."""
    best = min(G.n, G.r - 1)
    for e in G.edges:
        stack = [list(e)]
        while stack:
            p = stack.pop()
            best = max(best, len(p))
            for w in range(G.n):
                if w not in p and tuple(p[-(G.r - 1):] + [w]) in G.edges:
                    stack.append(p + [w])
    return best


# ------------------------------------------------------------ min degree


def min_degree_subgraph(
    vertices: Iterable, edges: Iterable[Sequence], d: Fraction | int | None = None
) -> tuple[list, list[tuple]]:
    """Peel minimum-degree vertices until the minimum degree exceeds d/r.

    `edges` are r-sets (any hashable vertex type).  d defaults to the average
    degree r|E|/|V|; a smaller d is allowed.  Returns the surviving vertex
    list and edge list.
    """
    verts = list(dict.fromkeys(vertices))
    es = [tuple(e) for e in edges]
    if not verts:
        raise PreconditionError("empty r-graph")
    r = len(es[0]) if es else 1
    avg = Fraction(r * len(es), len(verts))
    d = avg if d is None else Fraction(d)
    if d > avg:
        raise PreconditionError(f"average degree {avg} is below d={d}")
    if d <= 0:
        return verts, es
    deg = {v: 0 for v in verts}
    inc: dict = {v: [] for v in verts}
    for i, e in enumerate(es):
        for v in e:
            deg[v] += 1
            inc[v].append(i)
    alive_e = [True] * len(es)
    alive_v = set(verts)
    order = {v: i for i, v in enumerate(verts)}
    threshold = d / r
    while alive_v:
        v = min(alive_v, key=lambda x: (deg[x], order[x]))
        if deg[v] > threshold:
            keep = [x for x in verts if x in alive_v]
            return keep, [es[i] for i in range(len(es)) if alive_e[i]]
        alive_v.discard(v)
        for i in inc[v]:
            if alive_e[i]:
                alive_e[i] = False
                for w in es[i]:
                    if w != v:
                        deg[w] -= 1
    raise AlgorithmFailure("peeling removed every vertex")


# ------------------------------------------------------------ cycles to paths


def tight_r_cycles(G: RDigraph) -> list[tuple[int, ...]]:
    """Copies of the tight r-cycle, each listed from its smallest vertex."""
    r = G.r
    out = []
    for e in G.sorted_edges:
        if e[0] != min(e):
            continue
        if all(tuple(e[i:] + e[:i]) in G.edges for i in range(1, r)):
            out.append(e)
    return out


@dataclass(frozen=True)
class CyclePathResult:
    path: tuple[int, ...]
    cycles: int
    guarantee: Fraction
    core_size: int


def path_from_cycles(G: RDigraph) -> CyclePathResult:
    """Tight path on at least m / n_(r-1) + (r-1) vertices, m = number of tight r-cycles.

    Each cycle contributes the r-set of its cyclic (r-1)-intervals to an
    auxiliary r-graph on (r-1)-tuples; peeling that r-graph leaves a core in
    which every tuple closes at least m/n_(r-1) cycles.  From each core tuple
    the path is extended greedily through core cycles; once stuck, every such
    closing vertex is already on the path.
    """
    r, n = G.r, G.n
    if r < 2:
        raise InvalidInputError("needs r >= 2")
    cycles = tight_r_cycles(G)
    if not cycles:
        raise PreconditionError("the r-digraph has no tight r-cycle")
    m = len(cycles)
    tuples = list(permutations(range(n), r - 1))
    aux_edges = [frozenset(tuple(c[(i + j) % r] for j in range(r - 1)) for i in range(r)) for c in cycles]
    core_v, core_e = min_degree_subgraph(tuples, [tuple(sorted(e)) for e in aux_edges])
    core = set(core_v)
    # closing vertices per core tuple, restricted to core edges
    close: dict[tuple, set[int]] = {}
    for e in core_e:
        verts = set().union(*e)
        for sigma in e:
            (w,) = verts - set(sigma)
            close.setdefault(sigma, set()).add(w)
    guarantee = Fraction(m, falling(n, r - 1)) + (r - 1)
    best: list[int] = []
    for start in core_v:
        path = list(start)
        used = set(path)
        while True:
            sigma = tuple(path[-(r - 1):])
            nxt = sorted(w for w in close.get(sigma, ()) if w not in used)
            if not nxt:
                break
            path.append(nxt[0])
            used.add(nxt[0])
        if len(path) > len(best):
            best = path
    if not is_tight_path(G, best) or len(best) < guarantee:
        raise AlgorithmFailure(f"path of size {len(best)} misses the guarantee {guarantee}")
    return CyclePathResult(tuple(best), m, guarantee, len(core))


# ------------------------------------------------------------ (3,5) insertion


def spanning_path_35(G: RDigraph | Tournament, order: Sequence[int] | None = None, check: bool = False) -> list[int]:
    """Spanning tight path of a (3,5)-tournament by single-vertex insertion.

    Starts from an edge on the first three vertices of `order` and inserts
    the remaining n-3 vertices one at a time: u goes before v_i for the least
    i with (u, v_i, v_{i+1}) an edge, or at the end when no such i exists.
    """
    Gr = as_rdigraph(G)
    if Gr.r != 3 or is_rk_tournament(G) != 5:
        raise PreconditionError("input must be a (3,5)-tournament")
    order = list(range(Gr.n)) if order is None else list(order)
    if sorted(order) != list(range(Gr.n)):
        raise InvalidInputError("order must list every vertex once")
    E = Gr.edges
    path = next(p for p in permutations(order[:3]) if p in E)
    path = list(path)
    for u in order[3:]:
        for i in range(len(path) - 1):
            if (u, path[i], path[i + 1]) in E:
                path.insert(i, u)
                break
        else:
            path.append(u)
        if check and not is_tight_path(Gr, path):
            raise AlgorithmFailure(f"insertion of {u} broke the path")
    return path


# ------------------------------------------------------------ flexible paths


@dataclass
class FlexibleResult:
    path: list[int]
    success: bool
    steps: int
    note: str = ""


def _count_paths_from(E: frozenset, r: int, prefix: tuple, avail: set, size: int) -> int:
    """Tight paths of `size` vertices starting with `prefix` and using `avail`."""
    if len(prefix) == size:
        return 1
    total = 0
    tail = prefix[-(r - 1):]
    for w in avail:
        if tail + (w,) in E:
            total += _count_paths_from(E, r, prefix + (w,), avail - {w}, size)
    return total


def _extends(E: frozenset, r: int, path: Sequence[int], x: Sequence[int]) -> bool:
    seq = list(path) + list(x)
    start = max(0, len(path) - (r - 1))
    return all(tuple(seq[i : i + r]) in E for i in range(start, len(seq) - r + 1))


def _spanning_from(E: frozenset, r: int, prefix: tuple, avail: set) -> list[int] | None:
    if not avail:
        return list(prefix)
    tail = prefix[-(r - 1):]
    for w in sorted(avail):
        if tail + (w,) in E:
            rest = _spanning_from(E, r, prefix + (w,), avail - {w})
            if rest is not None:
                return rest
    return None


def spanning_path_flexible(G: RDigraph | Tournament) -> FlexibleResult:
    """Spanning path of a dense (r,k)-tournament by growing a flexible path.

    A path is flexible when more than half of the (r-1)-tuples of unused
    vertices extend it.  Each step appends the lexicographically least tuple
    that both extends the path and begins more than half the possible
    t-vertex paths among the unused vertices, t = min(n', 2r-2).
    """
    Gr = as_rdigraph(G)
    n, r = Gr.n, Gr.r
    k = is_rk_tournament(G)
    if k is None:
        raise PreconditionError("input is not an (r,k)-tournament")
    if Fraction(k) <= (1 - Fraction(1, 4 * (r - 1))) * factorial(r):
        raise PreconditionError(f"k={k} does not exceed (1 - 1/(4(r-1))) r!")
    if n < r:
        raise PreconditionError("needs n >= r")
    E = Gr.edges
    V = set(range(n))
    best_v, best_frac = None, Fraction(-1)
    for v in range(n):
        rest = V - {v}
        tuples = list(permutations(sorted(rest), r - 1))
        good = sum(1 for x in tuples if (v,) + x in E)
        frac = Fraction(good, len(tuples))
        if frac > best_frac:
            best_v, best_frac = v, frac
    if best_frac <= Fraction(1, 2):
        return FlexibleResult([best_v], False, 0, "no flexible starting vertex")
    path = [best_v]
    steps = 0
    while True:
        avail = V - set(path)
        n1 = len(avail)
        tuples = list(permutations(sorted(avail), r - 1))
        B = [x for x in tuples if _extends(E, r, path, x)]
        if 2 * len(B) <= len(tuples):
            return FlexibleResult(path, False, steps, "path lost flexibility")
        if n1 == r - 1:
            path += list(B[0])
            return FlexibleResult(path, True, steps + 1)
        t = min(n1, 2 * r - 2)
        half = Fraction(falling(n1, t), 2 * falling(n1, r - 1))
        pick = None
        for x in B:
            if _count_paths_from(E, r, tuple(x), avail - set(x), t) > half:
                pick = x
                break
        steps += 1
        if pick is None:
            return FlexibleResult(path, False, steps, "no tuple in A and B")
        if t == n1:
            rest = _spanning_from(E, r, tuple(pick), avail - set(pick))
            if rest is None:
                return FlexibleResult(path, False, steps, "chosen tuple does not start a spanning path")
            path += rest
            log.debug("flexible path finished after %d steps", steps)
            return FlexibleResult(path, True, steps)
        path += list(pick)


# ------------------------------------------------------------ bounded walks


@dataclass(frozen=True)
class BoundedWalkResult:
    graph: RDigraph
    vertices: tuple[int, ...]
    max_walk_size: int


def extract_bounded_walk_subgraph(G: RDigraph | Tournament, s: int | None = None) -> BoundedWalkResult:
    """Induced subgraph on a greedy vertex set T with no good r-set.

    P_sigma is a maximum tight path ending in the (r-1)-tuple sigma.  The
    r-tuple sigma + (w,) is good when w lies on P_sigma, and an r-set is good
    when one of its orderings is.  Every walk of G[T] then has at most
    max(r-1, s) vertices, where s bounds the longest tight path of G.
    """
    Gr = as_rdigraph(G)
    n, r = Gr.n, Gr.r
    if r < 2:
        raise InvalidInputError("needs r >= 2")
    longest = longest_tight_path_exact(G)
    if not longest.optimal:
        raise PreconditionError("longest path could not be certified within the state cap")
    if s is None:
        s = longest.size
    elif longest.size > s:
        raise PreconditionError(f"G has a tight path with {longest.size} > s={s} vertices")
    k = r - 1
    if n <= k or not Gr.edges:
        H, old = Gr.induced(range(n))
        return BoundedWalkResult(H, tuple(old), longest_walk(H).max_walk_size or 0)
    reach = reach_table_for(G)
    pops = _kernels._popcounts(n)
    good_sets: set[frozenset] = set()
    tvalid, _ = _kernels.tuple_tables(n, k)
    for idx in np.nonzero(tvalid)[0]:
        col = np.nonzero(reach[:, idx])[0]
        if col.size == 0:
            continue
        best = col[pops[col] == pops[col].max()].min()
        sigma = _kernels.decode(int(idx), n, k)
        for w in range(n):
            if (best >> w) & 1 and w not in sigma:
                good_sets.add(frozenset(sigma + (w,)))
    T: list[int] = []
    for v in range(n):
        if any(frozenset(c + (v,)) in good_sets for c in combinations(T, r - 1)):
            continue
        T.append(v)
    H, old = Gr.induced(T)
    rep = longest_walk(H)
    bound = max(r - 1, s)
    if not rep.finite or rep.max_walk_size > bound:
        raise AlgorithmFailure(f"extracted subgraph has a walk longer than {bound}")
    log.info("bounded-walk subgraph: %d of %d vertices (s=%d)", len(T), n, s)
    return BoundedWalkResult(H, tuple(old), rep.max_walk_size)
