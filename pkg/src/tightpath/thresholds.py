"""Walk-avoidance thresholds theta_t, transversals tau_t, and a(D), tau(D).

theta_t(D) is the largest vertex set inducing no walk with t vertices and
tau_t(D) = |V(D)| - theta_t(D).  t = None stands for t = infinity, where the
condition is acyclicity; then tau(D) is a minimum feedback vertex set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np

from . import _kernels
from .digraph import Digraph, is_acyclic, longest_walk
from .errors import InvalidInputError, PreconditionError, ResourceLimitError, UnsupportedError
from .families import CycleFamily, bundled_family, disjoint_cycle_family, load_data, resolve_vertex
from .perms import Perm, all_perms, perm_str
from .psg import build_psg, psg_successor_table, shift_cycles, totient

log = logging.getLogger(__name__)

SOFT_VERTEX_LIMIT = 30


# ------------------------------------------------------------ certificates


@dataclass(frozen=True)
class ThresholdCertificate:
    """avoid/transversal split of V(D), optionally with a lower-bound family.

    A family cycle with L vertices must lose at least ceil(L/t) vertices
    (one when t is None) to every size-t transversal, so the family proves
    tau_t(D) >= family_bound().
    """

    kind: str  # "walk-avoidance" or "cycle-transversal"
    t: int | None
    avoid: tuple[int, ...]
    transversal: tuple[int, ...]
    family: CycleFamily | None = None

    def cost(self, length: int) -> int:
        return 1 if self.t is None else -(-length // self.t)

    def family_bound(self) -> int:
        if self.family is None:
            return 0
        return sum(self.cost(len(c)) for c in self.family.cycles)

    def is_tight(self) -> bool:
        return self.family is not None and self.family_bound() == len(self.transversal)

    def with_family(self, family: CycleFamily) -> ThresholdCertificate:
        return ThresholdCertificate(self.kind, self.t, self.avoid, self.transversal, family)

    def to_json(self, D: Digraph | None = None) -> dict:
        def name(v):
            lab = None if D is None or D.labels is None else D.labels[v]
            return perm_str(lab) if isinstance(lab, tuple) else v

        return {
            "kind": self.kind,
            "t": self.t,
            "avoid": [name(v) for v in self.avoid],
            "transversal": [name(v) for v in self.transversal],
            "family": None if self.family is None else self.family.to_json(D),
        }

    @classmethod
    def from_json(cls, obj: dict, D: Digraph | None = None) -> ThresholdCertificate:
        try:
            kind = obj["kind"]
            t = obj.get("t")
            trans = tuple(sorted(resolve_vertex(D, x) for x in obj["transversal"]))
            if "avoid" in obj and obj["avoid"] is not None:
                avoid = tuple(sorted(resolve_vertex(D, x) for x in obj["avoid"]))
            elif D is not None:
                hit = set(trans)
                avoid = tuple(v for v in range(D.m) if v not in hit)
            else:
                raise InvalidInputError("certificate lacks an avoid set and no digraph was given")
            fam = obj.get("family")
            family = None if fam is None else CycleFamily.from_json(fam, D)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"not a certificate document: {exc}") from exc
        if kind not in ("walk-avoidance", "cycle-transversal"):
            raise InvalidInputError(f"unknown certificate kind {kind!r}")
        if kind == "cycle-transversal":
            t = None
        elif not isinstance(t, int) or t < 1:
            raise InvalidInputError(f"walk-avoidance certificate needs integer t >= 1, got {t!r}")
        return cls(kind, t, avoid, trans, family)


@dataclass
class Verification:
    ok: bool
    diagnostics: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(D: Digraph, cert: ThresholdCertificate) -> Verification:
    """Check every certificate clause against D; diagnostics name failures."""
    diag: list[str] = []
    avoid, trans = set(cert.avoid), set(cert.transversal)
    bad = [v for v in avoid | trans if not 0 <= v < D.m]
    if bad:
        diag.append(f"vertex ids outside 0..{D.m - 1}: {sorted(bad)[:5]}")
        return Verification(False, diag)
    if len(avoid) != len(cert.avoid) or len(trans) != len(cert.transversal):
        diag.append("avoid or transversal lists repeat a vertex")
    if avoid & trans:
        diag.append(f"avoid and transversal overlap in {len(avoid & trans)} vertices")
    if len(avoid | trans) != D.m:
        diag.append(f"avoid and transversal cover {len(avoid | trans)} of {D.m} vertices")
    if cert.kind == "cycle-transversal":
        if not is_acyclic(D, avoid):
            diag.append("the avoid set induces a cycle")
    else:
        rep = longest_walk(D, avoid)
        if not rep.finite:
            diag.append("the avoid set induces a cycle, so walks of every size")
        elif rep.max_walk_size >= cert.t:
            diag.append(f"the avoid set induces a walk with {rep.max_walk_size} >= t={cert.t} vertices")
    if cert.family is not None:
        diag += cert.family.problems(D)
        for ci, c in enumerate(cert.family.cycles):
            need = cert.cost(len(c))
            got = sum(1 for v in c if v in trans)
            if got < need:
                diag.append(f"family cycle {ci} meets the transversal in {got} < {need} vertices")
        if cert.family_bound() > len(cert.transversal):
            diag.append("family lower bound exceeds the transversal size")
    return Verification(not diag, diag)


# ------------------------------------------------------------ exact search


class _ThetaSolver:
    """Branch and bound for the fewest deletions leaving no walk of size t.

    A walk with t vertices either repeats a vertex, and then contains a cycle
    with at most t-1 vertices, or is a path on t vertices.  The solver keeps
    finding such an obstruction and branches on which of its vertices is
    deleted; earlier branch vertices become permanent in later branches so
    no deletion set is explored twice.  The lower bound packs disjoint
    obstructions: a cycle with L vertices needs ceil(L/t) deletions and a
    path with L vertices needs floor(L/t).
    """

    def __init__(self, D: Digraph, t: int | None, max_nodes: int):
        self.m = D.m
        self.t = t
        self.succ = [0] * D.m
        self.pred = [0] * D.m
        for u in range(D.m):
            for v in D.succ[u]:
                self.succ[u] |= 1 << v
                self.pred[v] |= 1 << u
        self.loops = sum(1 << v for v in range(D.m) if (self.succ[v] >> v) & 1)
        self.max_nodes = max_nodes
        self.nodes = 0
        self.best: int | None = None
        self.best_del = 0

    # -- helpers on bitmasks
    @staticmethod
    def bits(x: int):
        while x:
            low = x & -x
            yield low.bit_length() - 1
            x ^= low

    def trim(self, A: int) -> int:
        """Drop vertices that cannot lie on a cycle inside A (acyclic case)."""
        changed = True
        while changed:
            changed = False
            for v in self.bits(A):
                if not (self.succ[v] & A) or not (self.pred[v] & A):
                    A &= ~(1 << v)
                    changed = True
        return A

    def cycle_through(self, s: int, A: int, limit: int) -> list[int] | None:
        """A shortest cycle through s inside A with at most `limit` vertices."""
        if (self.succ[s] >> s) & 1:
            return [s]
        sbit = 1 << s
        layers = []
        frontier = self.succ[s] & A & ~sbit
        seen = frontier | sbit
        while frontier and len(layers) + 1 < limit:
            layers.append(frontier)
            nxt = 0
            for v in self.bits(frontier):
                nxt |= self.succ[v]
            if nxt & sbit:
                cyc = [s]
                cur = s
                for layer in reversed(layers):
                    for v in self.bits(layer):
                        if (self.succ[v] >> cur) & 1:
                            cyc.append(v)
                            cur = v
                            break
                return [cyc[0]] + cyc[:0:-1]
            frontier = nxt & A & ~seen
            seen |= frontier
        return None

    def t_path(self, A: int, prefer: int) -> list[int] | None:
        """Some simple path on t vertices inside A, preferring vertices in `prefer`."""
        t = self.t

        def order(x):
            return list(self.bits(x & prefer)) + list(self.bits(x & ~prefer))

        for s in order(A):
            stack = [[s]]
            iters = [iter(order(self.succ[s] & A & ~(1 << s)))]
            used = 1 << s
            while stack:
                path = stack[-1]
                if len(path) == t:
                    return path
                nxt = next(iters[-1], None)
                if nxt is None:
                    stack.pop()
                    iters.pop()
                    used &= ~(1 << path[-1])
                    continue
                if (used >> nxt) & 1:
                    continue
                used |= 1 << nxt
                stack.append(path + [nxt])
                iters.append(iter(order(self.succ[nxt] & A & ~used)))
        return None

    def extend(self, path: list[int], A: int) -> list[int]:
        used = sum(1 << v for v in path)
        while True:
            nxt = self.succ[path[-1]] & A & ~used
            if not nxt:
                break
            v = (nxt & -nxt).bit_length() - 1
            path.append(v)
            used |= 1 << v
        while True:
            prv = self.pred[path[0]] & A & ~used
            if not prv:
                break
            v = (prv & -prv).bit_length() - 1
            path.insert(0, v)
            used |= 1 << v
        return path

    def obstruction(self, A: int, P: int) -> tuple[str, list[int]] | None:
        """An obstruction in A, choosing one with few non-permanent vertices."""
        if self.t is None:
            best = None
            for s in self.bits(A & ~P):
                c = self.cycle_through(s, A, self.m + 1)
                if c is None:
                    continue
                score = sum(1 for v in c if not (P >> v) & 1)
                if best is None or score < best[0] or (score == best[0] and len(c) < len(best[1])):
                    best = (score, c)
                    if score <= 1:
                        break
            if best is None and A & P:
                for s in self.bits(A & P):
                    c = self.cycle_through(s, A, self.m + 1)
                    if c is not None:
                        return "cycle", c
            return None if best is None else ("cycle", best[1])
        best = None
        for s in self.bits(A):
            c = self.cycle_through(s, A, self.t)
            if c is not None:
                score = sum(1 for v in c if not (P >> v) & 1)
                if best is None or score < best[0]:
                    best = (score, c)
                    if score <= 1:
                        break
        if best is not None:
            return "cycle", best[1]
        p = self.t_path(A, P)
        return None if p is None else ("path", p)

    def lower_bound(self, A: int) -> int:
        total = 0
        B = A
        while B:
            if self.t is None:
                B = self.trim(B)
                if not B:
                    break
                deg = {v: bin(self.succ[v] & B).count("1") + bin(self.pred[v] & B).count("1") for v in self.bits(B)}
                s = min(deg, key=lambda v: (deg[v], v))
                c = self.cycle_through(s, B, self.m + 1)
                if c is None:
                    B &= ~(1 << s)
                    continue
                total += 1
                B &= ~sum(1 << v for v in c)
                continue
            found = None
            for s in self.bits(B):
                c = self.cycle_through(s, B, self.m + 1)
                if c is not None:
                    found = ("cycle", c)
                    break
            if found is None:
                p = self.t_path(B, 0)
                if p is None:
                    break
                p = self.extend(p, B)
                found = ("path", p)
            kind, vs = found
            L = len(vs)
            total += -(-L // self.t) if kind == "cycle" else L // self.t
            B &= ~sum(1 << v for v in vs)
        return total

    def solve(self) -> tuple[int, int]:
        full = (1 << self.m) - 1
        if self.t == 1:
            return self.m, full
        forced = self.loops
        A = full & ~forced
        self.best = None
        self.best_del = 0
        self._branch(A, 0, forced)
        return self.best, self.best_del

    def _branch(self, A: int, P: int, deleted: int):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise ResourceLimitError(
                f"exact threshold search exceeded {self.max_nodes} nodes; use certificate mode"
            )
        if self.t is None:
            A = self.trim(A)
            P &= A
        ndel = bin(deleted).count("1")
        if self.best is not None and ndel + self.lower_bound(A) >= self.best:
            return
        obs = self.obstruction(A, P)
        if obs is None:
            self.best, self.best_del = ndel, deleted
            return
        _, vs = obs
        free = [v for v in vs if not (P >> v) & 1]
        for idx, v in enumerate(free):
            newP = P | sum(1 << w for w in free[:idx])
            self._branch(A & ~(1 << v), newP, deleted | (1 << v))
            if self.best is not None and self.best <= ndel + 1:
                return


def theta_exact(
    D: Digraph,
    t: int | None,
    max_vertices: int = SOFT_VERTEX_LIMIT,
    max_nodes: int = 2_000_000,
) -> tuple[int, ThresholdCertificate]:
    """theta_t(D) exactly, with an avoid/transversal certificate.

    t = None computes a(D).  Digraphs above `max_vertices` are refused with
    ResourceLimitError since certificates are the intended route there.
    """
    if t is not None and t < 1:
        raise InvalidInputError(f"t must be >= 1 or None, got {t}")
    if D.m > max_vertices:
        raise ResourceLimitError(
            f"{D.m} vertices exceeds the exact-search limit {max_vertices}; "
            "verify a certificate instead"
        )
    solver = _ThetaSolver(D, t, max_nodes)
    _, deleted = solver.solve()
    trans = tuple(v for v in range(D.m) if (deleted >> v) & 1)
    avoid = tuple(v for v in range(D.m) if not (deleted >> v) & 1)
    kind = "cycle-transversal" if t is None else "walk-avoidance"
    log.debug("theta_exact t=%s: %d nodes", t, solver.nodes)
    return len(avoid), ThresholdCertificate(kind, t, avoid, trans)


def tau_exact(D: Digraph, t: int | None = None, **kw) -> int:
    value, _ = theta_exact(D, t, **kw)
    return D.m - value


# ------------------------------------------------------------ constructions


def construct_transversal_mod_t(r: int, t: int) -> list[Perm]:
    """Permutations whose value 1 sits at 0-based position r-1 or a multiple of t.

    Every walk with t vertices in PSG_r meets this set; its size is
    (1 + ceil((r-1)/t)) (r-1)!.
    """
    if not 1 <= t <= r:
        raise InvalidInputError(f"need 1 <= t <= r, got t={t}, r={r}")
    out = []
    for p in all_perms(r):
        i = p.index(1)
        if i == r - 1 or i % t == 0:
            out.append(p)
    return out


def mod_t_transversal_size(r: int, t: int) -> int:
    return (1 + -(-(r - 1) // t)) * factorial(r - 1)


def shift_cycle_lower_bound(r: int, t: int | None) -> int:
    """Every size-t transversal meets each of the (r-1)! shift cycles ceil(r/t) times."""
    per = 1 if t is None else -(-r // t)
    return per * factorial(r - 1)


def tau_formula_divisible(r: int, t: int) -> tuple[Fraction, Fraction]:
    """(tau_t, theta_t) of PSG_r when t divides r-1."""
    if t < 1 or (r - 1) % t:
        raise PreconditionError(f"t={t} does not divide r-1={r - 1}")
    tau = (Fraction(1, r) + Fraction(1, t) - Fraction(1, t * r)) * factorial(r)
    return tau, factorial(r) - tau


def walk_certificate_psg(r: int, t: int) -> ThresholdCertificate:
    """theta_t(PSG_r) certificate: the mod-t transversal plus the shift cycles."""
    D = build_psg(r)
    trans = sorted(D.vertex(p) for p in construct_transversal_mod_t(r, t))
    hit = set(trans)
    avoid = tuple(v for v in range(D.m) if v not in hit)

    fam = CycleFamily(tuple(tuple(D.vertex(p) for p in C.vertices) for C in shift_cycles(r)))
    return ThresholdCertificate("walk-avoidance", t, avoid, tuple(trans), fam)


def has_bump(p: Sequence[int], i: int) -> bool:
    """1-based position i holds a strict local maximum with both neighbours present."""
    return 1 < i < len(p) and p[i - 1] > p[i - 2] and p[i - 1] > p[i]


def psg4_transversal() -> list[Perm]:
    """1234, 4321 and every permutation with a2 = max(a1, a2, a3)."""
    out = [(1, 2, 3, 4), (4, 3, 2, 1)]
    out += [p for p in all_perms(4) if p[1] == max(p[:3])]
    return sorted(out)


def psg5_transversal() -> list[Perm]:
    """12345, 54321 and bumps at position 2, minus those with bumps at 2 and 4 and u3 = 1."""
    base = {(1, 2, 3, 4, 5), (5, 4, 3, 2, 1)}
    base |= {p for p in all_perms(5) if has_bump(p, 2)}
    s0 = {p for p in base if has_bump(p, 2) and has_bump(p, 4) and p[2] == 1}
    return sorted(base - s0)


def transversal_certificate(D: Digraph, transversal, family: CycleFamily | None = None):
    trans = sorted({resolve_vertex(D, x) if not isinstance(x, tuple) else D.vertex(x) for x in transversal})
    hit = set(trans)
    avoid = tuple(v for v in range(D.m) if v not in hit)
    return ThresholdCertificate("cycle-transversal", None, avoid, tuple(trans), family)


def _cluster_check_args(r: int, t: int):
    if t < 1 or r < max(3 * t + 2, 3):
        raise PreconditionError(f"cluster transversal needs t >= 1 and r >= 3t+2, got r={r}, t={t}")


def cluster_membership(r: int, t: int) -> np.ndarray:
    """Boolean array over PSG_r vertices (rank order) marking S0 | S1 | S2."""
    _cluster_check_args(r, t)
    perms = np.array(all_perms(r), dtype=np.int8).reshape(-1, r)
    return _kernels.cluster_members(perms, r, t)


def construct_cycle_transversal_clusters(r: int, t: int) -> list[Perm]:
    """The S0 / S1 / S2 cycle transversal of PSG_r built from bookmarks r-1, r.

    Positions are 1-based.  A = {1..t+1} together with {r-2t..r}.  S0 holds
    permutations where r-1 and r both sit in A and one of them sits at 1,
    r-t or r.  The cluster of value l at position j <= r-t is the pattern of
    the t entries after it; S1 takes u_{r-t} = r with cluster(r-1) >= cluster(r)
    and S2 takes u_1 = r with cluster(r) >= cluster(r-1), comparing clusters
    lexicographically.
    """
    mem = cluster_membership(r, t)
    perms = all_perms(r)
    return [perms[i] for i in np.nonzero(mem)[0]]


def cluster_transversal_size(r: int, t: int) -> int:
    """|S0 u S1 u S2| counted without materialising PSG_r (feasible to r = 11)."""
    _cluster_check_args(r, t)
    if r > 12:
        raise ResourceLimitError(f"counting r! = {factorial(r)} permutations is out of range")
    return _kernels.cluster_count(r, t)


def cluster_size_bound(r: int, t: int) -> Fraction:
    """r! (1/r + 1/(r t!) + 6(3t+2)/(r(r-1)))."""
    return factorial(r) * (
        Fraction(1, r) + Fraction(1, r * factorial(t)) + Fraction(6 * (3 * t + 2), r * (r - 1))
    )


def psg_minus_is_acyclic(r: int, removed_mask: np.ndarray) -> bool:
    """Kahn's algorithm on PSG_r with the marked vertices deleted, vectorised."""

    succ = psg_successor_table(r).astype(np.int64)
    alive = ~np.asarray(removed_mask, dtype=bool)
    m = succ.shape[0]
    src = np.repeat(np.arange(m), succ.shape[1])
    dst = succ.ravel()
    keep = alive[src] & alive[dst]
    src, dst = src[keep], dst[keep]
    indeg = np.bincount(dst, minlength=m)
    order = np.argsort(src, kind="stable")
    src, dst = src[order], dst[order]
    start = np.searchsorted(src, np.arange(m + 1))
    frontier = np.nonzero(alive & (indeg == 0))[0]
    done = 0
    while frontier.size:
        done += frontier.size
        lo, hi = start[frontier], start[frontier + 1]
        idx = np.concatenate([np.arange(a, b) for a, b in zip(lo, hi)]) if frontier.size else np.array([], int)
        targets = dst[idx]
        np.subtract.at(indeg, targets, 1)
        cand = np.unique(targets)
        frontier = cand[indeg[cand] == 0]
    return done == int(alive.sum())


# ------------------------------------------------------------ thresholds


def psg_cycle_certificate(r: int) -> ThresholdCertificate:
    """The best shipped certificate for tau(PSG_r), r in {3, 4, 5}."""
    D = build_psg(r)
    if r == 5:
        return ThresholdCertificate.from_json(load_data("psg5_cert.json"), D)
    if r == 4:

        return transversal_certificate(D, psg4_transversal(), bundled_family(4))
    if r == 3:

        _, cert = theta_exact(D, None)
        return cert.with_family(disjoint_cycle_family(3))
    raise UnsupportedError(f"no shipped certificate for r={r}")


def growing_threshold(r: int) -> int | tuple[int, int]:
    """1 + a(PSG_r), or a (low, high) interval when the bounds do not meet."""
    if r < 2:
        raise UnsupportedError("growing threshold needs r >= 2")
    if r <= 4:
        a, _ = theta_exact(build_psg(r), None)
        return 1 + a
    D = build_psg(r) if r <= 9 else None
    if r == 5:
        cert = psg_cycle_certificate(5)
        if verify_certificate(D, cert) and cert.is_tight():
            return 1 + len(cert.avoid)
    lower_tau = factorial(r - 1) + totient(r)
    upper_tau = factorial(r)
    if r <= 9:
        for t in range(1, (r - 2) // 3 + 1):
            mem = cluster_membership(r, t)
            if psg_minus_is_acyclic(r, mem):
                upper_tau = min(upper_tau, int(mem.sum()))
    if lower_tau == upper_tau:
        return 1 + factorial(r) - lower_tau
    return (1 + factorial(r) - upper_tau, 1 + factorial(r) - lower_tau)


def linear_threshold_upper(r: int) -> Fraction:
    """(1 - 1/r + 1/r!) r!: above this k, tight paths grow linearly."""
    return (1 - Fraction(1, r) + Fraction(1, factorial(r))) * factorial(r)


def spanning_threshold_upper(r: int) -> int:
    """Smallest integer k with k > (1 - 1/(4(r-1))) r!."""
    bound = (1 - Fraction(1, 4 * (r - 1))) * factorial(r)
    return int(bound) + 1


def constant_path_threshold(r: int, t: int) -> int:
    """Smallest k forcing a tight path with r-1+t vertices: theta_t(PSG_r) + 1."""
    if (r - 1) % t == 0:
        _, theta = tau_formula_divisible(r, t)
        return int(theta) + 1
    D = build_psg(r)
    if D.m <= SOFT_VERTEX_LIMIT:
        return theta_exact(D, t)[0] + 1
    cert = walk_certificate_psg(r, t)
    if verify_certificate(D, cert) and cert.is_tight():
        return len(cert.avoid) + 1
    raise ResourceLimitError(f"no exact theta_{t}(PSG_{r}) available")


__all__ = [
    "ThresholdCertificate",
    "Verification",
    "cluster_size_bound",
    "cluster_transversal_size",
    "constant_path_threshold",
    "construct_cycle_transversal_clusters",
    "construct_transversal_mod_t",
    "growing_threshold",
    "linear_threshold_upper",
    "psg4_transversal",
    "psg5_transversal",
    "spanning_threshold_upper",
    "tau_formula_divisible",
    "theta_exact",
    "verify_certificate",
]
