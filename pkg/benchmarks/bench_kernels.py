"""Time the numba kernels against the numpy fallback on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

The backend is switched through TIGHTPATH_DISABLE_NUMBA, exactly as a user
would.  The first numba call per kernel includes JIT compilation, so it is
run once untimed as a warm-up.
"""

from __future__ import annotations

import argparse
import os
import time

import numpy as np

from tightpath import _kernels
from tightpath.tournaments import ext_from_masks, random_masks, random_tournament


def _cases():
    rng = np.random.default_rng(7)
    T = random_tournament(11, 3, 4, 1)
    ext11 = T.ext_table()
    batch = ext_from_masks(7, 3, random_masks(7, 3, 4, 5000, rng))
    perms = np.array([rng.permutation(8) + 1 for _ in range(50_000)], dtype=np.int64)
    return [
        ("reach_table n=11 r=3", lambda: _kernels.reach_table(11, 2, ext11)),
        ("count_table n=11 r=3", lambda: _kernels.count_table(11, 2, ext11)),
        ("spanning batch 5000 x n=7", lambda: _kernels.spanning_exists_batch(7, 2, batch)),
        ("cluster members 50k perms r=8", lambda: _kernels.cluster_members(perms, 8, 2)),
        ("cluster count r=8 t=2", lambda: _kernels.cluster_count(8, 2)),
    ]


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rows = []
    for name, fn in _cases():
        os.environ["TIGHTPATH_DISABLE_NUMBA"] = "0"
        fn()  # compile
        t_nb, out_nb = _time(fn, args.repeat)
        os.environ["TIGHTPATH_DISABLE_NUMBA"] = "1"
        t_np, out_np = _time(fn, args.repeat)
        same = bool(np.array_equal(np.asarray(out_nb), np.asarray(out_np)))
        rows.append((name, t_nb, t_np, same))
    os.environ.pop("TIGHTPATH_DISABLE_NUMBA", None)
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel'.ljust(width)}  {'numba s':>9}  {'numpy s':>9}  {'speedup':>8}  equal")
    for name, a, b, same in rows:
        print(f"{name.ljust(width)}  {a:9.4f}  {b:9.4f}  {b / a:8.1f}  {same}")


if __name__ == "__main__":
    main()
