"""(r,k)-tournaments stored as one orientation mask per r-set, and the
explicit constructions built on them.

Mask bit p of an r-set S is set when the ordering of sorted(S) whose
canonical pattern has lexicographic rank p is an edge.  r-sets are indexed in
``itertools.combinations`` order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, permutations
from math import comb, factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from .digraph import RDigraph
from .errors import InvalidInputError, ResourceLimitError, UnsupportedError
from .perms import Perm, all_perms, arrange, canonical_pattern, perm_index
from .psg import build_psg


@lru_cache(maxsize=32)
def subsets(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(n), r))


@lru_cache(maxsize=32)
def subset_index(n: int, r: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(subsets(n, r))}


def pattern_mask(r: int, patterns: Iterable[Sequence[int]]) -> int:
    idx = perm_index(r)
    mask = 0
    for p in patterns:
        p = tuple(p)
        if p not in idx:
            raise InvalidInputError(f"{p} is not a permutation of [{r}]")
        mask |= 1 << idx[p]
    return mask


@lru_cache(maxsize=32)
def edge_slots(n: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """(prefix code, last vertex) for every (r-set, pattern rank) slot.

    The prefix code is the base-n encoding of the first r-1 vertices of the
    ordering, matching the state encoding of the path kernels.
    """
    subs = np.array(subsets(n, r), dtype=np.int64).reshape(-1, r)
    pats = np.array(all_perms(r), dtype=np.int64).reshape(-1, r) - 1
    ordered = np.take_along_axis(
        np.broadcast_to(subs[:, None, :], (subs.shape[0], pats.shape[0], r)),
        np.broadcast_to(pats[None, :, :], (subs.shape[0], pats.shape[0], r)),
        axis=2,
    )
    code = np.zeros(ordered.shape[:2], dtype=np.int64)
    for q in range(r - 1):
        code = code * n + ordered[:, :, q]
    last = ordered[:, :, r - 1]
    code.flags.writeable = False
    last.flags.writeable = False
    return code, last


def ext_from_masks(n: int, r: int, masks: np.ndarray) -> np.ndarray:
    """Path-kernel ext tables for a batch of mask vectors (shape samples x C(n,r))."""
    masks = np.atleast_2d(np.asarray(masks, dtype=np.int64))
    code, last = edge_slots(n, r)
    ext = np.zeros((masks.shape[0], n ** (r - 1)), dtype=np.int64)
    for c in range(code.shape[0]):
        col = masks[:, c]
        for p in range(code.shape[1]):
            on = (col >> p) & 1
            ext[:, code[c, p]] |= on << last[c, p]
    return ext


@dataclass(frozen=True)
class Tournament:
    """Orientation masks over the r-sets of [n]; see the module docstring."""

    n: int
    r: int
    masks: tuple[int, ...]

    def __post_init__(self):
        if self.r < 1 or self.n < 0:
            raise InvalidInputError(f"bad parameters n={self.n}, r={self.r}")
        if len(self.masks) != comb(self.n, self.r):
            raise InvalidInputError(f"expected {comb(self.n, self.r)} masks, got {len(self.masks)}")
        top = 1 << factorial(self.r)
        if any(not 0 <= m < top for m in self.masks):
            raise InvalidInputError("mask outside the r! pattern bits")
        object.__setattr__(self, "masks", tuple(int(m) for m in self.masks))

    @classmethod
    def from_rule(cls, n: int, r: int, rule: Callable[[tuple[int, ...]], int]) -> Tournament:
        return cls(n, r, tuple(rule(s) for s in subsets(n, r)))

    def mask(self, subset: Iterable[int]) -> int:
        return self.masks[subset_index(self.n, self.r)[tuple(sorted(subset))]]

    def k(self) -> int | None:
        """Common popcount of all masks, or None if they differ (or n < r)."""
        counts = {bin(m).count("1") for m in self.masks}
        return counts.pop() if len(counts) == 1 else None

    def has_edge(self, e: Sequence[int]) -> bool:
        s = tuple(sorted(e))
        p = canonical_pattern(e)
        return bool((self.mask(s) >> perm_index(self.r)[p]) & 1)

    def edges(self) -> Iterable[tuple[int, ...]]:
        pats = all_perms(self.r)
        for s, m in zip(subsets(self.n, self.r), self.masks):
            while m:
                low = m & -m
                yield arrange(s, pats[low.bit_length() - 1])
                m ^= low

    @cached_property
    def rdigraph(self) -> RDigraph:
        return RDigraph(self.n, self.r, frozenset(self.edges()))

    def to_rdigraph(self) -> RDigraph:
        return self.rdigraph

    @classmethod
    def from_rdigraph(cls, G: RDigraph) -> Tournament:
        idx = perm_index(G.r)
        sub = subset_index(G.n, G.r)
        masks = [0] * len(sub)
        for e in G.edges:
            masks[sub[tuple(sorted(e))]] |= 1 << idx[canonical_pattern(e)]
        return cls(G.n, G.r, tuple(masks))

    def ext_table(self) -> np.ndarray:
        if self.n > 62:
            raise ResourceLimitError(f"bitmask kernels need n <= 62, got {self.n}")
        return ext_from_masks(self.n, self.r, np.array(self.masks, dtype=np.int64))[0]

    def to_json(self) -> dict:
        return self.rdigraph.to_json()

    def relabel(self, perm: Sequence[int]) -> Tournament:
        """Image under the vertex bijection v -> perm[v]."""
        return Tournament.from_rdigraph(
            RDigraph(self.n, self.r, frozenset(tuple(perm[v] for v in e) for e in self.edges()))
        )


def as_tournament(G: RDigraph | Tournament) -> Tournament:
    return G if isinstance(G, Tournament) else Tournament.from_rdigraph(G)


def as_rdigraph(G: RDigraph | Tournament) -> RDigraph:
    return G.rdigraph if isinstance(G, Tournament) else G


def find_rk_violation(G: RDigraph | Tournament) -> tuple[int | None, tuple[int, ...] | None]:
    """(k, None) when every r-set carries k edges; (None, offending r-set) otherwise."""
    T = as_tournament(G)
    if not T.masks:
        return None, None
    k = bin(T.masks[0]).count("1")
    for s, m in zip(subsets(T.n, T.r), T.masks):
        if bin(m).count("1") != k:
            return None, s
    return k, None


def is_rk_tournament(G: RDigraph | Tournament) -> int | None:
    """k when G is an (r,k)-tournament, else None (also when n < r)."""
    return find_rk_violation(G)[0]


# ------------------------------------------------------------ constructions


def construct_from_pattern_set(n: int, r: int, S: Iterable[Sequence[int]]) -> Tournament:
    """Edge iff the canonical pattern lies in S: an (r, |S|)-tournament."""
    m = pattern_mask(r, S)
    return Tournament(n, r, (m,) * comb(n, r))


def construct_max_second(n: int, r: int) -> Tournament:
    """Edges are the tuples with u2 = max(u1, u2, u3); k = r!/3."""
    if r < 3:
        raise UnsupportedError("needs r >= 3")
    return construct_from_pattern_set(n, r, [p for p in all_perms(r) if p[1] == max(p[:3])])


def construct_first_not_max(n: int, r: int) -> Tournament:
    """Every ordering except those starting with the maximum; k = r! - (r-1)!."""
    if r < 2:
        raise UnsupportedError("needs r >= 2")
    return construct_from_pattern_set(n, r, [p for p in all_perms(r) if p[0] != r])


def construct_middle_not_max(n: int) -> Tournament:
    """(u, v, w) is an edge iff v is not the largest of the three."""
    if n < 3:
        raise InvalidInputError("needs n >= 3")
    return construct_from_pattern_set(n, 3, [p for p in all_perms(3) if p[1] != 3])


def construct_interval_density(n: int, r: int, t: int) -> RDigraph:
    """Split [n] into t consecutive intervals X_1..X_t.

    (u_1, ..., u_r) is an edge iff u_1 lies in some X_p and a later entry
    lies in X_q with q > p.
    """
    if t < 1 or n % t:
        raise InvalidInputError(f"t={t} must divide n={n}")
    size = n // t
    edges = []
    for e in permutations(range(n), r):
        p = e[0] // size
        if any(v // size > p for v in e[1:]):
            edges.append(e)
    return RDigraph(n, r, frozenset(edges))


def interval_density_bound(r: int, t: int):
    """(1 - 1/r)(1 - r/t)^r, the density the interval construction exceeds."""

    return (1 - Fraction(1, r)) * (1 - Fraction(r, t)) ** r


# binary (3,3) construction: allowed (top, bottom) rows of the {alpha, beta} minor;
# None in the bottom row matches either bit
_ALLOWED_33 = (
    ((0, 1, 0), (None, None, None)),
    ((0, 0, 1), (0, 1, None)),
    ((0, 1, 1), (None, 1, 0)),
    ((1, 1, 0), (None, None, None)),
)
MAX_BINARY33_MATERIALISED = 8


def _bit(x, coord, t):
    """Coordinate `coord` (1-based, coordinate 1 = most significant bit)."""
    return (x >> (t - coord)) & 1


def _leading_coord(x: int, t: int) -> int:
    """Smallest coordinate where x has a 1 (x > 0)."""
    return t - (x.bit_length() - 1)


def binary33_alpha_beta(u: int, v: int, w: int, t: int) -> tuple[int, int]:
    """(alpha, beta) of three distinct vectors of F_2^t, coordinates 1-based."""
    alpha = _leading_coord((u ^ v) | (v ^ w), t)
    a, b, c = (_bit(x, alpha, t) for x in (u, v, w))
    if a == b:
        pair = (u, v)
    elif b == c:
        pair = (v, w)
    else:
        pair = (u, w)
    return alpha, _leading_coord(pair[0] ^ pair[1], t)


def binary33_contains(u: int, v: int, w: int, t: int) -> bool:
    """Edge predicate of the (3,3) construction on F_2^t, usable for any t."""
    alpha, beta = binary33_alpha_beta(u, v, w, t)
    top = tuple(_bit(x, alpha, t) for x in (u, v, w))
    bot = tuple(_bit(x, beta, t) for x in (u, v, w))
    for ptop, pbot in _ALLOWED_33:
        if top == ptop and all(q is None or q == b for q, b in zip(pbot, bot)):
            return True
    return False


def _binary33_masks(t: int) -> np.ndarray:
    n = 1 << t
    subs = np.array(subsets(n, 3), dtype=np.int64).reshape(-1, 3)
    masks = np.zeros(subs.shape[0], dtype=np.int64)

    def lead(x):
        # coordinate of the most significant set bit; x > 0 wherever used
        top = np.zeros_like(x)
        for b in range(t):
            top = np.where((x >> b) & 1, b, top)
        return t - top

    def bit(x, coord):
        return (x >> (t - coord)) & 1

    for rank, p in enumerate(all_perms(3)):
        u, v, w = (subs[:, q - 1] for q in p)
        alpha = lead((u ^ v) | (v ^ w))
        a, b, c = bit(u, alpha), bit(v, alpha), bit(w, alpha)
        px = np.where(a == b, u, np.where(b == c, v, u))
        py = np.where(a == b, v, np.where(b == c, w, w))
        beta = lead(px ^ py)
        top = (a, b, c)
        bot = (bit(u, beta), bit(v, beta), bit(w, beta))
        ok = np.zeros(subs.shape[0], dtype=bool)
        for ptop, pbot in _ALLOWED_33:
            m = np.ones(subs.shape[0], dtype=bool)
            for q in range(3):
                m &= top[q] == ptop[q]
                if pbot[q] is not None:
                    m &= bot[q] == pbot[q]
            ok |= m
        masks |= ok.astype(np.int64) << rank
    return masks


def construct_binary_33(t: int) -> Tournament:
    """(3,3)-tournament on F_2^t (vertex = integer, coordinate 1 = MSB).

    Materialised for t <= 8; larger t is available through binary33_contains.
    """
    if t < 1:
        raise InvalidInputError("t must be >= 1")
    if t > MAX_BINARY33_MATERIALISED:
        raise ResourceLimitError(
            f"C(2^{t}, 3) triples is too many to materialise; use binary33_contains"
        )
    n = 1 << t
    if n < 3:
        return Tournament(n, 3, ())
    return Tournament(n, 3, tuple(_binary33_masks(t).tolist()))


# ------------------------------------------------------------ cycle sharpness


def shift_class_digraph(r: int) -> tuple[list[tuple[Perm, ...]], set[tuple[int, int]]]:
    """Shift classes of PSG_r and the arcs between distinct classes."""
    D = build_psg(r)
    cls_of = {}
    classes = []
    for p in all_perms(r):
        if p in cls_of:
            continue
        members = [p]
        for _ in range(r - 1):
            members.append(members[-1][1:] + members[-1][:1])
        for q in members:
            cls_of[q] = len(classes)
        classes.append(tuple(members))
    arcs = set()
    for u, v in D.arcs:
        a, b = cls_of[D.labels[u]], cls_of[D.labels[v]]
        if a != b:
            arcs.add((a, b))
    return classes, arcs


def greedy_independent_set(m: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Maximal independent set, repeatedly taking a lowest-degree vertex."""
    nbr = [set() for _ in range(m)]
    for a, b in edges:
        if a != b:
            nbr[a].add(b)
            nbr[b].add(a)
    alive = set(range(m))
    out = []
    while alive:
        v = min(alive, key=lambda x: (len(nbr[x] & alive), x))
        out.append(v)
        alive -= nbr[v] | {v}
    return sorted(out)


@dataclass(frozen=True)
class SharpnessInstance:
    graph: RDigraph
    classes: tuple[tuple[Perm, ...], ...]  # the chosen independent shift classes
    parts: tuple[tuple[int, ...], ...]

    def path_bound(self) -> int:
        """r * ceil(n / |I|)."""
        return self.graph.r * -(-self.graph.n // len(self.classes))


def construct_cycle_sharpness(n: int, r: int) -> SharpnessInstance:
    """Every r-set carries one tight r-cycle, with a shift class chosen by min(S).

    The classes come from an independent set of the contracted shift-class
    graph, so consecutive edges of a tight path always use the same class.
    """
    if r not in (3, 4):
        raise UnsupportedError(f"cycle sharpness construction supports r in {{3, 4}}, got {r}")
    if n < r:
        raise InvalidInputError(f"needs n >= r, got n={n}")
    classes, arcs = shift_class_digraph(r)
    I = greedy_independent_set(len(classes), arcs)
    chosen = [classes[i] for i in I]
    q, rem = divmod(n, len(chosen))
    parts, start = [], 0
    for j in range(len(chosen)):
        size = q + (1 if j < rem else 0)
        parts.append(tuple(range(start, start + size)))
        start += size
    part_of = {v: j for j, p in enumerate(parts) for v in p}
    masks = [pattern_mask(r, chosen[part_of[s[0]]]) for s in subsets(n, r)]
    G = Tournament(n, r, tuple(masks)).rdigraph
    return SharpnessInstance(G, tuple(chosen), tuple(parts))


# ------------------------------------------------------------ random samplers


def random_masks(n: int, r: int, k: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Per r-set, a uniform k-subset of the r! patterns; shape (samples, C(n,r))."""
    f = factorial(r)
    if not 0 <= k <= f:
        raise InvalidInputError(f"k must lie in 0..{f}")
    c = comb(n, r)
    keys = rng.random((samples, c, f))
    pick = np.argsort(keys, axis=2)[:, :, :k]
    return (np.int64(1) << pick).sum(axis=2) if k else np.zeros((samples, c), dtype=np.int64)


def random_tournament(n: int, r: int, k: int, seed: int | np.random.Generator = 0) -> Tournament:
    rng = np.random.default_rng(seed)
    return Tournament(n, r, tuple(random_masks(n, r, k, 1, rng)[0].tolist()))
