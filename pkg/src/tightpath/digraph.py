"""r-digraphs, ordinary digraphs, tight paths and walk analysis.

Walk *size* is always a vertex count.  A walk in an r-digraph is a vertex
sequence, repeats allowed, whose r-intervals are all edges; sequences shorter
than r are vacuously walks.  Walks of size w >= r in an r-digraph correspond
to walks of size w - r + 2 in its shift digraph.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError, UnsupportedError
from .perms import perm_str

log = logging.getLogger(__name__)

Edge = tuple[int, ...]


def falling(n: int, r: int) -> int:
    """n (n-1) ... (n-r+1); 0 when r > n."""
    out = 1
    for i in range(r):
        out *= n - i
    return max(out, 0)


@dataclass(frozen=True)
class RDigraph:
    """n vertices 0..n-1; each edge an ordered r-tuple of distinct vertices."""

    n: int
    r: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        if self.r < 1:
            raise InvalidInputError(f"uniformity must be >= 1, got {self.r}")
        if self.n < 0:
            raise InvalidInputError(f"negative vertex count {self.n}")
        edges = frozenset(tuple(int(v) for v in e) for e in self.edges)
        for e in edges:
            if len(e) != self.r:
                raise InvalidInputError(f"edge {e} does not have {self.r} entries")
            if len(set(e)) != self.r:
                raise InvalidInputError(f"edge {e} repeats a vertex")
            if min(e) < 0 or max(e) >= self.n:
                raise InvalidInputError(f"edge {e} has a vertex outside 0..{self.n - 1}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def complete(cls, n: int, r: int) -> RDigraph:
        return cls(n, r, frozenset(permutations(range(n), r)))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(e) in self.edges

    @cached_property
    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def ext_table(self) -> np.ndarray:
        """Bitmask of appendable vertices for every encoded (r-1)-tuple."""
        return _ext_table(self)

    def induced(self, keep: Iterable[int]) -> tuple[RDigraph, list[int]]:
        """Induced subgraph relabelled to 0..len(keep)-1, plus the old labels."""
        old = sorted(set(keep))
        new = {v: i for i, v in enumerate(old)}
        edges = frozenset(
            tuple(new[v] for v in e) for e in self.edges if all(v in new for v in e)
        )
        return RDigraph(len(old), self.r, edges), old

    def to_json(self) -> dict:
        return {"r": self.r, "n": self.n, "edges": [list(e) for e in self.sorted_edges]}

    @classmethod
    def from_json(cls, obj: dict) -> RDigraph:
        try:
            return cls(int(obj["n"]), int(obj["r"]), frozenset(tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"not an r-digraph document: {exc}") from exc

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{", "  node [shape=circle];"]
        lines += [f"  v{v} [label=\"{v}\"];" for v in range(self.n)]
        if self.r == 2:
            lines += [f"  v{a} -> v{b};" for a, b in self.sorted_edges]
        else:
            for i, e in enumerate(self.sorted_edges):
                label = " ".join(str(v) for v in e)
                lines.append(f"  e{i} [shape=box, label=\"{label}\"];")
                lines += [f"  v{v} -> e{i} [label=\"{p + 1}\"];" for p, v in enumerate(e)]
        lines.append("}")
        return "\n".join(lines) + "\n"


def _ext_table(G: RDigraph, max_states: int = 1 << 26) -> np.ndarray:
    if G.n > 62:
        raise ResourceLimitError(f"bitmask kernels need n <= 62, got {G.n}")
    k = G.r - 1
    size = G.n**k
    if size > max_states:
        raise ResourceLimitError(f"{size} (r-1)-tuple states exceeds cap {max_states}")
    ext = np.zeros(size, dtype=np.int64)
    for e in G.edges:
        idx = 0
        for v in e[:-1]:
            idx = idx * G.n + v
        ext[idx] |= np.int64(1) << e[-1]
    return ext


@dataclass(frozen=True)
class Digraph:
    """Vertices 0..m-1 with sorted successor lists; loops allowed.

    `labels` optionally names each vertex (permutations for PSG_r, tuples for
    shift digraphs).
    """

    m: int
    succ: tuple[tuple[int, ...], ...]
    labels: tuple | None = field(default=None, compare=False)

    @classmethod
    def from_arcs(cls, m: int, arcs: Iterable[tuple[int, int]], labels=None) -> Digraph:
        out: list[set[int]] = [set() for _ in range(m)]
        for u, v in arcs:
            if not (0 <= u < m and 0 <= v < m):
                raise InvalidInputError(f"arc ({u}, {v}) has an endpoint outside 0..{m - 1}")
            out[u].add(v)
        return cls(m, tuple(tuple(sorted(s)) for s in out), None if labels is None else tuple(labels))

    @cached_property
    def arcs(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u in range(self.m) for v in self.succ[u])

    @cached_property
    def succ_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(s) for s in self.succ)

    @cached_property
    def pred(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.m)]
        for u in range(self.m):
            for v in self.succ[u]:
                out[v].append(u)
        return tuple(tuple(p) for p in out)

    @cached_property
    def label_index(self) -> dict:
        if self.labels is None:
            return {}
        return {lab: i for i, lab in enumerate(self.labels)}

    def num_arcs(self) -> int:
        return sum(len(s) for s in self.succ)

    def has_arc(self, u: int, v: int) -> bool:
        return v in self.succ_sets[u]

    def vertex(self, label) -> int:
        """Vertex id for a label (or the id itself when unlabelled)."""
        if self.labels is None:
            return int(label)
        try:
            return self.label_index[label]
        except KeyError:
            raise InvalidInputError(f"unknown vertex label {label!r}") from None

    def to_json(self) -> dict:
        out = {"m": self.m, "arcs": [list(a) for a in sorted(self.arcs)]}
        if self.labels is not None:
            out["labels"] = [_label_str(x) for x in self.labels]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Digraph:
        try:
            return cls.from_arcs(int(obj["m"]), [tuple(a) for a in obj["arcs"]], obj.get("labels"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"not a digraph document: {exc}") from exc

    def to_dot(self, name: str = "D") -> str:
        lines = [f"digraph {name} {{"]
        for v in range(self.m):
            lab = v if self.labels is None else _label_str(self.labels[v])
            lines.append(f"  n{v} [label=\"{lab}\"];")
        lines += [f"  n{u} -> n{v};" for u, v in sorted(self.arcs)]
        lines.append("}")
        return "\n".join(lines) + "\n"


def _label_str(x) -> str:
    if isinstance(x, tuple):
        return perm_str(x)
    return str(x)


@dataclass(frozen=True)
class WalkReport:
    finite: bool
    max_walk_size: int | None
    witness: list


# ------------------------------------------------------------ tight paths


def is_walk_rdigraph(G: RDigraph, seq: Sequence[int]) -> bool:
    r = G.r
    return all(tuple(seq[i : i + r]) in G.edges for i in range(len(seq) - r + 1))


def is_tight_path(G: RDigraph, seq: Sequence[int]) -> bool:
    """Distinct vertices whose r-intervals are all edges of G."""
    seq = [int(v) for v in seq]
    if any(v < 0 or v >= G.n for v in seq):
        log.debug("vertex outside 0..%d in %s", G.n - 1, seq)
        return False
    if len(set(seq)) != len(seq):
        return False
    return is_walk_rdigraph(G, seq)


# ------------------------------------------------------------ digraph walks


def _alive_set(D: Digraph, alive) -> list[bool]:
    if alive is None:
        return [True] * D.m
    flags = [False] * D.m
    for v in alive:
        flags[v] = True
    return flags


def topological_order(D: Digraph, alive=None) -> list[int] | None:
    """Kahn's algorithm on the subgraph induced by `alive`; None if cyclic."""
    on = _alive_set(D, alive)
    indeg = [0] * D.m
    for u in range(D.m):
        if on[u]:
            for v in D.succ[u]:
                if on[v]:
                    indeg[v] += 1
    queue = [v for v in range(D.m) if on[v] and indeg[v] == 0]
    order = []
    while queue:
        u = queue.pop()
        order.append(u)
        for v in D.succ[u]:
            if on[v]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
    if len(order) != sum(on):
        return None
    return order


def is_acyclic(D: Digraph, alive=None) -> bool:
    return topological_order(D, alive) is not None


def find_cycle(D: Digraph, alive=None) -> list[int] | None:
    """Some directed cycle (a loop counts) inside `alive`, as a vertex list."""
    on = _alive_set(D, alive)
    color = [0] * D.m  # 0 new, 1 on stack, 2 done
    parent = [-1] * D.m
    for root in range(D.m):
        if not on[root] or color[root]:
            continue
        stack = [(root, iter(D.succ[root]))]
        color[root] = 1
        while stack:
            u, it = stack[-1]
            for v in it:
                if not on[v]:
                    continue
                if color[v] == 1:
                    cyc = [u]
                    while cyc[-1] != v:
                        cyc.append(parent[cyc[-1]])
                    return cyc[::-1]
                if color[v] == 0:
                    color[v] = 1
                    parent[v] = u
                    stack.append((v, iter(D.succ[v])))
                    break
            else:
                color[u] = 2
                stack.pop()
    return None


def is_cycle(D: Digraph, cyc: Sequence[int]) -> bool:
    if not cyc or len(set(cyc)) != len(cyc):
        return False
    return all(D.has_arc(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))


def _digraph_longest_walk(D: Digraph, alive=None) -> WalkReport:
    order = topological_order(D, alive)
    if order is None:
        return WalkReport(False, None, find_cycle(D, alive))
    if not order:
        return WalkReport(True, 0, [])
    on = _alive_set(D, alive)
    dist = [1] * D.m
    back = [-1] * D.m
    for u in order:
        for v in D.succ[u]:
            if on[v] and dist[u] + 1 > dist[v]:
                dist[v] = dist[u] + 1
                back[v] = u
    end = max(order, key=lambda v: (dist[v], -v))
    walk = [end]
    while back[walk[-1]] >= 0:
        walk.append(back[walk[-1]])
    return WalkReport(True, dist[end], walk[::-1])


# ------------------------------------------------------------ shift digraph


def shift_digraph(G: RDigraph) -> Digraph:
    """Vertices: (r-1)-tuples that prefix or suffix an edge; arc per edge."""
    if G.r < 2:
        raise UnsupportedError("shift digraph needs r >= 2")
    nodes = sorted({e[:-1] for e in G.edges} | {e[1:] for e in G.edges})
    index = {t: i for i, t in enumerate(nodes)}
    arcs = [(index[e[:-1]], index[e[1:]]) for e in G.edges]
    return Digraph.from_arcs(len(nodes), arcs, labels=nodes)


def _tuples_to_walk(labels: Sequence[tuple]) -> list[int]:
    if not labels:
        return []
    return list(labels[0]) + [t[-1] for t in labels[1:]]


def has_closed_walk(G: RDigraph) -> bool:
    if G.r < 2:
        raise UnsupportedError("closed walks need r >= 2")
    return not is_acyclic(shift_digraph(G))


def longest_walk(G: RDigraph | Digraph, alive=None) -> WalkReport:
    """Longest walk (vertex count) or a closed-walk witness if unbounded.

    For a Digraph the witness of an unbounded report is a cycle; for an
    r-digraph it is a closed walk whose cyclic r-intervals are edges.
    """
    if isinstance(G, Digraph):
        return _digraph_longest_walk(G, alive)
    if G.r < 2:
        raise UnsupportedError("walk analysis needs r >= 2")
    S = shift_digraph(G)
    rep = _digraph_longest_walk(S)
    if not rep.finite:
        labs = [S.labels[v] for v in rep.witness]
        return WalkReport(False, None, [t[0] for t in labs])
    vacuous = list(range(min(G.n, G.r - 1)))
    vacuous += [0] * (G.r - 1 - len(vacuous))
    if rep.max_walk_size == 0:
        return WalkReport(True, G.r - 1, vacuous if G.n else [])
    size = rep.max_walk_size + G.r - 2
    walk = _tuples_to_walk([S.labels[v] for v in rep.witness])
    return WalkReport(True, size, walk)


def edge_density(G: RDigraph) -> Fraction:
    if G.n < G.r:
        raise InvalidInputError(f"density needs n >= r (n={G.n}, r={G.r})")
    return Fraction(len(G.edges), falling(G.n, G.r))


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
