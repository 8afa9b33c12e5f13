"""Command-line entry point.

Exit codes: 0 success, 1 a property failed or a counterexample was found,
2 usage or input error, 3 a resource limit was hit.
"""

from __future__ import annotations

import argparse
import contextlib
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Callable

from . import _kernels
from .conjectures import (
    check_34,
    check_pairwise_intersecting,
    walk_length_coloring,
)
from .digraph import Digraph, RDigraph, longest_walk
from .errors import (
    AlgorithmFailure,
    InvalidInputError,
    PreconditionError,
    ResourceLimitError,
    UnsupportedError,
)
from .families import data_path, disjoint_cycle_family, search_disjoint_cycle_family
from .paths import (
    PathSearchOptions,
    count_spanning_paths,
    extract_bounded_walk_subgraph,
    longest_tight_path_exact,
    path_from_cycles,
    spanning_path_35,
    spanning_path_flexible,
)
from .perms import parse_perm, perm_str
from .psg import build_psg, chorded_shift_cycles, cycle_chords, realize_walk, shift_cycles
from .tables import diff_table, expected_table, format_table, table_thresholds
from .thresholds import (
    ThresholdCertificate,
    construct_cycle_transversal_clusters,
    construct_transversal_mod_t,
    growing_threshold,
    theta_exact,
    verify_certificate,
)
from .tournaments import (
    construct_binary_33,
    construct_cycle_sharpness,
    construct_first_not_max,
    construct_from_pattern_set,
    construct_interval_density,
    construct_max_second,
    construct_middle_not_max,
    find_rk_violation,
    random_tournament,
)

log = logging.getLogger("tightpath")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunManifest:
    argv: list[str]
    seed: int
    limits: dict
    tool_version: str
    backend: str
    inputs: dict[str, str] = field(default_factory=dict)
    output_sha256: str = ""
    exit_code: int = 0

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class Outcome:
    """What a subcommand produced: a JSON payload, text, optional DOT, exit code."""

    payload: dict
    text: str
    dot: str | None = None
    code: int = EXIT_OK


def _tool_version() -> str:
    try:
        return version("tightpath")
    except PackageNotFoundError:  # running from a source tree
        return "0+unknown"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ------------------------------------------------------------ input helpers


def resolve_path(name: str) -> Path:
    """A filesystem path, falling back to the bundled data directory."""
    p = Path(name)
    if p.exists():
        return p
    bundled = data_path(p.name)
    if bundled.is_file():
        return Path(str(bundled))
    raise InvalidInputError(f"no such file: {name}")


class _Inputs:
    def __init__(self):
        self.digests: dict[str, str] = {}

    def load(self, name: str) -> dict:
        path = resolve_path(name)
        raw = path.read_bytes()
        self.digests[name] = _sha256(raw)
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{name}: invalid JSON ({exc})") from exc

    def rdigraph(self, name: str) -> RDigraph:
        return RDigraph.from_json(self.load(name))


def _perm_list(text: str) -> list[tuple[int, ...]]:
    return [parse_perm(x) for x in text.split(",") if x.strip()]


# ------------------------------------------------------------ psg


def cmd_psg(args, inp: _Inputs) -> Outcome:
    r = args.r
    if args.action == "build":
        D = build_psg(r)
        payload = D.to_json()
        text = "\n".join(
            f"{perm_str(D.labels[u])} -> {' '.join(perm_str(D.labels[v]) for v in D.succ[u])}" for u in range(D.m)
        )
        return Outcome(payload, text, D.to_dot(f"PSG{r}"))
    if args.action == "chorded":
        rows = [
            {"cycle": [perm_str(p) for p in C.vertices], "chord": [perm_str(a) for a in ch.arc], "from": ch.from_index, "to": ch.to_index}
            for C, ch in chorded_shift_cycles(r)
        ]
        text = "\n".join(" ".join(x["cycle"]) + f"   chord {x['chord'][0]} -> {x['chord'][1]}" for x in rows)
        return Outcome({"r": r, "chorded": rows}, text)
    if args.action in ("cycles", "shift-cycles"):
        rows = []
        for C in shift_cycles(r):
            chords = cycle_chords(C)
            rows.append(
                {
                    "cycle": [perm_str(p) for p in C.vertices],
                    "chords": [[perm_str(a), perm_str(b)] for a, b in (ch.arc for ch in chords)],
                }
            )
        chorded = sum(1 for x in rows if x["chords"])
        payload = {"r": r, "shift_cycles": rows, "chorded": chorded, "totient_check": chorded == len(chorded_shift_cycles(r))}
        text = "\n".join(" ".join(x["cycle"]) + (f"   chords: {len(x['chords'])}" if x["chords"] else "") for x in rows)
        text += f"\n{chorded} of {len(rows)} shift cycles carry a chord or loop"
        return Outcome(payload, text, code=EXIT_OK if payload["totient_check"] else EXIT_VIOLATION)
    if args.action == "family":
        D = build_psg(r)
        if args.search:
            fam = search_disjoint_cycle_family(D, seed=args.seed, budget=args.iterations)
        else:
            fam = disjoint_cycle_family(r, bundled=args.bundled)
        problems = fam.problems(D)
        payload = {"r": r, "size": len(fam), "length_counts": list(fam.length_counts()), "cycles": fam.to_json(D), "problems": problems}
        text = "\n".join(" ".join(c) for c in payload["cycles"])
        text += f"\n{len(fam)} disjoint cycles, length counts {tuple(payload['length_counts'])}"
        return Outcome(payload, text, code=EXIT_VIOLATION if problems else EXIT_OK)
    if args.action == "realize":
        if not args.walk:
            raise UsageError("psg realize needs --walk")
        seq = realize_walk(r, _perm_list(args.walk))
        return Outcome({"r": r, "sequence": seq}, " ".join(map(str, seq)))
    raise UsageError(f"unknown psg action {args.action}")


# ------------------------------------------------------------ thresholds


def _digraph_arg(args, inp: _Inputs) -> Digraph:
    if args.psg is not None:
        return build_psg(args.psg)
    if args.input:
        return Digraph.from_json(inp.load(args.input))
    raise UsageError("give --psg R or --in digraph.json")


def cmd_thresh(args, inp: _Inputs) -> Outcome:
    if args.action == "theta":
        D = _digraph_arg(args, inp)
        value, cert = theta_exact(D, args.t, max_nodes=args.max_nodes)
        payload = {"t": args.t, "theta": value, "tau": D.m - value, "certificate": cert.to_json(D)}
        label = "inf" if args.t is None else args.t
        return Outcome(payload, f"theta_{label} = {value}, tau_{label} = {D.m - value}")
    if args.action == "certify":
        D = _digraph_arg(args, inp)
        if not args.cert:
            raise UsageError("thresh certify needs --cert")
        cert = ThresholdCertificate.from_json(inp.load(args.cert), D)
        ver = verify_certificate(D, cert)
        tight = cert.is_tight()
        payload = {
            "ok": bool(ver),
            "tight": tight,
            "transversal_size": len(cert.transversal),
            "avoid_size": len(cert.avoid),
            "family_bound": cert.family_bound(),
            "diagnostics": ver.diagnostics,
        }
        text = "certificate verified" if ver else "certificate rejected"
        text += f": |transversal| = {len(cert.transversal)}, |avoid| = {len(cert.avoid)}, family bound {cert.family_bound()}"
        if ver and tight:
            text += " (tight)"
        text += "".join(f"\n  {d}" for d in ver.diagnostics)
        return Outcome(payload, text, code=EXIT_OK if ver else EXIT_VIOLATION)
    if args.action == "growing":
        g = growing_threshold(args.r)
        v = list(g) if isinstance(g, tuple) else g
        return Outcome({"r": args.r, "growing_threshold": v}, f"growing-path threshold for r={args.r}: {v}")
    if args.action in ("modt", "clusters"):
        if args.t is None:
            raise UsageError(f"thresh {args.action} needs --t")
        build = construct_transversal_mod_t if args.action == "modt" else construct_cycle_transversal_clusters
        S = build(args.r, args.t)
        payload = {"r": args.r, "t": args.t, "size": len(S)}
        if args.r <= 6:
            payload["transversal"] = [perm_str(p) for p in S]
        return Outcome(payload, f"|S| = {len(S)}")
    raise UsageError(f"unknown thresh action {args.action}")


# ------------------------------------------------------------ tournaments


_CONSTRUCTIONS: dict[str, Callable] = {
    "max-second": lambda a: construct_max_second(a.n, a.r),
    "first-not-max": lambda a: construct_first_not_max(a.n, a.r),
    "middle-not-max": lambda a: construct_middle_not_max(a.n),
    "interval": lambda a: construct_interval_density(a.n, a.r, a.t),
    "binary33": lambda a: construct_binary_33(a.t),
    "sharpness": lambda a: construct_cycle_sharpness(a.n, a.r).graph,
    "patterns": lambda a: construct_from_pattern_set(a.n, a.r, _perm_list(a.patterns or "")),
    "random": lambda a: random_tournament(a.n, a.r, a.k, a.seed),
}


def _graph_outcome(G) -> Outcome:
    Gr = G if isinstance(G, RDigraph) else G.rdigraph
    k, bad = find_rk_violation(Gr)
    text = f"n={Gr.n} r={Gr.r} edges={len(Gr.edges)}" + (f" k={k}" if k is not None else "")
    return Outcome(Gr.to_json(), text, Gr.to_dot())


def cmd_tourn(args, inp: _Inputs) -> Outcome:
    if args.action == "construct":
        if args.kind not in _CONSTRUCTIONS:
            raise UsageError(f"unknown construction {args.kind!r}; choose from {sorted(_CONSTRUCTIONS)}")
        needs = {"interval": ("n", "t"), "binary33": ("t",), "random": ("n", "k"), "patterns": ("n", "patterns")}
        for need in needs.get(args.kind, ("n",)):
            if getattr(args, need) is None:
                raise UsageError(f"--kind {args.kind} needs --{need}")
        return _graph_outcome(_CONSTRUCTIONS[args.kind](args))
    if args.action == "check":
        G = inp.rdigraph(_need_in(args))
        k, bad = find_rk_violation(G)
        walk = longest_walk(G) if G.r >= 2 else None
        payload = {
            "n": G.n,
            "r": G.r,
            "k": k,
            "violating_set": None if bad is None else list(bad),
            "closed_walk": None if walk is None else not walk.finite,
        }
        text = f"(r,k)-tournament with k={k}" if k is not None else f"not a tournament: r-set {bad}"
        if walk is not None:
            text += "; has a closed walk" if not walk.finite else f"; longest walk {walk.max_walk_size}"
        return Outcome(payload, text)
    raise UsageError(f"unknown tourn action {args.action}")


# ------------------------------------------------------------ paths


def _need_in(args) -> str:
    if not args.input:
        raise UsageError("this command needs --in graph.json")
    return args.input


def cmd_paths(args, inp: _Inputs) -> Outcome:
    G = inp.rdigraph(_need_in(args))
    if args.action == "longest":
        mode = "heuristic" if args.heuristic else "exact"
        res = longest_tight_path_exact(G, PathSearchOptions(mode, args.budget_ms, seed=args.seed))
        payload = {"size": res.size, "path": list(res.path), "optimal": res.optimal}
        text = f"{'maximum' if res.optimal else 'found'} tight path, {res.size} vertices: {' '.join(map(str, res.path))}"
        code = EXIT_OK if res.optimal or mode == "heuristic" else EXIT_RESOURCE
        return Outcome(payload, text, code=code)
    if args.action == "span35":
        p = spanning_path_35(G, check=True)
        return Outcome({"path": p}, " ".join(map(str, p)))
    if args.action == "span-flex":
        res = spanning_path_flexible(G)
        payload = {"path": res.path, "success": res.success, "steps": res.steps, "note": res.note}
        text = ("spanning path: " if res.success else f"failed ({res.note}) at: ") + " ".join(map(str, res.path))
        return Outcome(payload, text, code=EXIT_OK if res.success else EXIT_VIOLATION)
    if args.action == "from-cycles":
        res = path_from_cycles(G)
        payload = {"path": list(res.path), "cycles": res.cycles, "guarantee": str(res.guarantee)}
        return Outcome(payload, f"{len(res.path)} vertices (guarantee {res.guarantee}, {res.cycles} r-cycles): {' '.join(map(str, res.path))}")
    if args.action == "extract":
        res = extract_bounded_walk_subgraph(G, args.s)
        payload = {"vertices": list(res.vertices), "max_walk_size": res.max_walk_size, "graph": res.graph.to_json()}
        return Outcome(payload, f"kept {len(res.vertices)} vertices, longest walk {res.max_walk_size}", res.graph.to_dot())
    raise UsageError(f"unknown paths action {args.action}")


# ------------------------------------------------------------ conjectures


def cmd_conj(args, inp: _Inputs) -> Outcome:
    if args.action == "check34":
        if args.n is None:
            raise UsageError("conj check34 needs --n")
        rep = check_34(args.n, args.mode, args.seed, args.samples, acyclic=args.acyclic)
        payload = rep.to_json()
        log.info("search took %.3f s", payload.pop("runtime_s"))
        text = (
            f"{rep.property} n={rep.n} {rep.mode}: {rep.instances_checked} instances"
            + (f" ({rep.canonical_classes} classes of {rep.raw_instances})" if rep.canonical_classes is not None else "")
            + (", no counterexample" if rep.ok else ", COUNTEREXAMPLE found")
        )
        return Outcome(payload, text, code=EXIT_OK if rep.ok else EXIT_VIOLATION)
    G = inp.rdigraph(_need_in(args))
    if args.action == "count-paths":
        c = count_spanning_paths(G)
        return Outcome({"spanning_paths": c}, str(c))
    if args.action == "coloring":
        col = walk_length_coloring(G)
        payload = {
            "ok": col.ok,
            "colors": {f"{u},{v}": list(c) for (u, v), c in col.colors.items()},
            "num_colors": col.num_colors,
            "longest_walk_size": col.longest_walk_size,
            "monochromatic_triangle": col.monochromatic_triangle,
        }
        text = f"{col.num_colors} colors, " + ("no monochromatic triangle" if col.ok else f"monochromatic {col.monochromatic_triangle}")
        return Outcome(payload, text, code=EXIT_OK if col.ok else EXIT_VIOLATION)
    if args.action == "intersect":
        rep = check_pairwise_intersecting(G)
        payload = {
            "ok": rep.ok,
            "max_size": rep.max_size,
            "max_vertex_sets": rep.max_vertex_sets,
            "disjoint_pair": rep.disjoint_pair,
            "longer_path": rep.longer_path,
        }
        text = f"{rep.max_vertex_sets} maximum vertex sets of size {rep.max_size}: " + ("pairwise intersecting" if rep.ok else "DISJOINT pair found")
        return Outcome(payload, text, code=EXIT_OK if rep.ok else EXIT_VIOLATION)
    raise UsageError(f"unknown conj action {args.action}")


# ------------------------------------------------------------ tables


def cmd_table(args, inp: _Inputs) -> Outcome:
    rows = table_thresholds(args.r)
    diff = diff_table(rows, expected_table(args.r))
    payload = {"r": args.r, "rows": [row.to_json() for row in rows], "diff": diff}
    text = format_table(args.r, rows) + "".join(f"\nMISMATCH {d}" for d in diff)
    return Outcome(payload, text, code=EXIT_VIOLATION if diff else EXIT_OK)


# ------------------------------------------------------------ parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "dot", "text"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $TIGHTPATH_THREADS or all)")
    p.add_argument("--budget-ms", type=int, default=None, dest="budget_ms")
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--manifest", default=None, help="write a replay manifest to this path")
    p.add_argument("--out", default=None, help="write the result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tightpath", description="Tight paths in directed hypergraphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("psg", help="pattern-shift graphs")
    p.add_argument("action", choices=("build", "cycles", "shift-cycles", "chorded", "family", "realize"))
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--bundled", action="store_true")
    p.add_argument("--search", action="store_true")
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--walk", default=None, help="comma-separated permutations")
    _common(p)
    p.set_defaults(func=cmd_psg)

    p = sub.add_parser("thresh", help="walk-avoiding sets and cycle transversals")
    p.add_argument("action", choices=("theta", "certify", "growing", "modt", "clusters"))
    p.add_argument("--psg", type=int, default=None)
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--t", type=int, default=None, help="walk size bound (omit for cycles)")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--cert", default=None)
    p.add_argument("--max-nodes", type=int, default=2_000_000, dest="max_nodes")
    _common(p)
    p.set_defaults(func=cmd_thresh)

    p = sub.add_parser("tourn", help="tournament constructions and checks")
    p.add_argument("action", choices=("construct", "check"))
    p.add_argument("--kind", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--patterns", default=None)
    p.add_argument("--in", dest="input", default=None)
    _common(p)
    p.set_defaults(func=cmd_tourn)

    p = sub.add_parser("paths", help="tight path algorithms")
    p.add_argument("action", choices=("longest", "span35", "span-flex", "from-cycles", "extract"))
    p.add_argument("--in", dest="input", default=None)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--heuristic", action="store_true")
    p.add_argument("--s", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("conj", help="conjecture checks")
    p.add_argument("action", choices=("check34", "count-paths", "coloring", "intersect"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="random")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--acyclic", action="store_true")
    p.add_argument("--in", dest="input", default=None)
    _common(p)
    p.set_defaults(func=cmd_conj)

    p = sub.add_parser("table", help="threshold table")
    p.add_argument("action", choices=("thresholds",))
    p.add_argument("--r", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_table)
    return parser


def _render(out: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out.payload, indent=2, sort_keys=True, default=str) + "\n"
    if fmt == "dot":
        if out.dot is None:
            raise UsageError("this command has no DOT output")
        return out.dot
    return out.text + "\n"


def _error(kind: str, exc: BaseException, code: int) -> int:
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
    return code


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _error("usage", exc, EXIT_USAGE)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    threads = args.threads
    if threads is None and os.environ.get("TIGHTPATH_THREADS"):
        threads = int(os.environ["TIGHTPATH_THREADS"])
    threads = _kernels.set_threads(threads)
    inp = _Inputs()
    try:
        out = args.func(args, inp)
        text = _render(out, args.format)
        code = out.code
    except UsageError as exc:
        return _error("usage", exc, EXIT_USAGE)
    except (InvalidInputError, UnsupportedError, PreconditionError) as exc:
        return _error(type(exc).__name__, exc, EXIT_USAGE)
    except ResourceLimitError as exc:
        return _error("resource", exc, EXIT_RESOURCE)
    except AlgorithmFailure as exc:
        return _error("algorithm", exc, EXIT_VIOLATION)
    data = text.encode("utf-8")
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(text)
    if args.manifest:
        man = RunManifest(
            argv=argv,
            seed=args.seed,
            limits={"budget_ms": args.budget_ms, "threads": threads},
            tool_version=_tool_version(),
            backend=_kernels.backend(),
            inputs=inp.digests,
            output_sha256=_sha256(data),
            exit_code=code,
        )
        Path(args.manifest).write_text(json.dumps(man.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return code


def replay(manifest_path: str) -> bool:
    """Rerun a manifest's command and compare output digests."""
    man = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    argv = [a for a in man["argv"]]
    # drop the manifest and out flags so the replay does not overwrite anything
    cleaned, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--manifest", "--out"):
            skip = True
            continue
        cleaned.append(a)
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run(cleaned)
    return code == man["exit_code"] and _sha256(buf.getvalue().encode("utf-8")) == man["output_sha256"]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
