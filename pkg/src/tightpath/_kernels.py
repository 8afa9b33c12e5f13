"""Hot inner loops: bitmask path DPs and permutation-scan membership.

Every kernel exists twice, a numba ``@njit`` version and a vectorised numpy
version.  The numba path is used when numba imports and the environment
variable ``TIGHTPATH_DISABLE_NUMBA`` is unset or ``0``.  Both paths return
identical arrays; tests/test_kernels.py checks that on random inputs.

State encoding shared by the path DPs: an ordered tuple of ``k = r - 1``
vertices is the base-``n`` integer with the first vertex most significant;
``ext[idx]`` is the bitmask of vertices ``w`` such that ``tuple + (w,)`` is an
edge.  Appending ``w`` maps ``idx`` to ``(idx % n**(k-1)) * n + w``.
"""

from __future__ import annotations

import os
from functools import lru_cache
from itertools import islice, permutations
from math import factorial

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe, which warns on older system TBB builds
        numba.config.THREADING_LAYER = "omp"
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    flag = os.environ.get("TIGHTPATH_DISABLE_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag in ("", "0", "false", "no")


def backend() -> str:
    return "numba" if numba_enabled() else "numpy"


def set_threads(count: int | None) -> int:
    """Cap the numba worker pool; returns the count in effect (1 for numpy)."""
    if not numba_enabled():
        return 1
    top = numba.config.NUMBA_NUM_THREADS
    count = top if count is None else max(1, min(int(count), top))
    numba.set_num_threads(count)
    return count


@lru_cache(maxsize=64)
def tuple_tables(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(valid, mask) over all base-n codes of k-tuples; valid = distinct entries."""
    size = n**k
    codes = np.arange(size, dtype=np.int64)
    mask = np.zeros(size, dtype=np.int64)
    valid = np.ones(size, dtype=np.bool_)
    rest = codes.copy()
    for _ in range(k):
        digit = rest % n
        rest //= n
        bit = np.left_shift(np.int64(1), digit)
        valid &= (mask & bit) == 0
        mask |= bit
    valid.flags.writeable = False
    mask.flags.writeable = False
    return valid, mask


def encode(t, n: int) -> int:
    idx = 0
    for v in t:
        idx = idx * n + v
    return idx


def decode(idx: int, n: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        idx, d = divmod(idx, n)
        out.append(d)
    return tuple(reversed(out))


# ---------------------------------------------------------------- numpy path


def _reach_np(n, k, ext, tvalid, tmask):
    size = ext.shape[0]
    reach = np.zeros((1 << n, size), dtype=np.bool_)
    init = np.nonzero(tvalid)[0]
    reach[tmask[init], init] = True
    pop = _popcounts(n)
    mod = n ** (k - 1)
    for layer in range(k, n):
        masks = np.nonzero(pop == layer)[0]
        rows, cols = np.nonzero(reach[masks])
        if rows.size == 0:
            continue
        m = masks[rows]
        e = ext[cols]
        base = (cols % mod) * n
        for w in range(n):
            bit = np.int64(1) << w
            ok = ((e & bit) != 0) & ((m & bit) == 0)
            if ok.any():
                reach[m[ok] | bit, base[ok] + w] = True
    return reach


def _count_np(n, k, ext, tvalid, tmask):
    size = ext.shape[0]
    cnt = np.zeros((1 << n, size), dtype=np.int64)
    init = np.nonzero(tvalid)[0]
    cnt[tmask[init], init] = 1
    pop = _popcounts(n)
    mod = n ** (k - 1)
    for layer in range(k, n):
        masks = np.nonzero(pop == layer)[0]
        rows, cols = np.nonzero(cnt[masks])
        if rows.size == 0:
            continue
        m = masks[rows]
        c = cnt[m, cols]
        e = ext[cols]
        base = (cols % mod) * n
        for w in range(n):
            bit = np.int64(1) << w
            ok = ((e & bit) != 0) & ((m & bit) == 0)
            if ok.any():
                np.add.at(cnt, (m[ok] | bit, base[ok] + w), c[ok])
    return cnt


def _spanning_batch_np(n, k, ext_batch, tvalid, tmask):
    full = (1 << n) - 1
    out = np.zeros(ext_batch.shape[0], dtype=np.bool_)
    for s in range(ext_batch.shape[0]):
        out[s] = _reach_np(n, k, ext_batch[s], tvalid, tmask)[full].any()
    return out


def _lehmer_rank_rows(w: np.ndarray) -> np.ndarray:
    t = w.shape[1]
    rank = np.zeros(w.shape[0], dtype=np.int64)
    for a in range(t):
        smaller = np.zeros(w.shape[0], dtype=np.int64)
        for b in range(a + 1, t):
            smaller += w[:, b] < w[:, a]
        rank += smaller * factorial(t - 1 - a)
    return rank


def _cluster_members_np(perms, r, t):
    p = perms.astype(np.int64)
    j = np.argmax(p == r, axis=1) + 1
    i = np.argmax(p == r - 1, axis=1) + 1

    def in_a(x):
        return (x <= t + 1) | (x >= r - 2 * t)

    def special(x):
        return (x == 1) | (x == r - t) | (x == r)

    s0 = in_a(i) & in_a(j) & (special(i) | special(j))

    def lam(pos):
        start = np.minimum(pos, r - t)
        cols = start[:, None] + np.arange(t)[None, :]
        return _lehmer_rank_rows(np.take_along_axis(p, cols, axis=1))

    li, lj = lam(i), lam(j)
    ok_i = i <= r - t
    s1 = ~s0 & (p[:, r - t - 1] == r) & ok_i & (li >= lj)
    s2 = ~s0 & (p[:, 0] == r) & ok_i & (lj >= li)
    return s0 | s1 | s2


def _cluster_count_np(r, t, chunk=1 << 20):

    it = permutations(range(1, r + 1))
    total = 0
    while True:
        block = list(islice(it, chunk))
        if not block:
            return total
        total += int(_cluster_members_np(np.array(block, dtype=np.int8), r, t).sum())


@lru_cache(maxsize=4)
def _popcounts(n):
    x = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros_like(x)
    while x.any():
        pop += x & 1
        x >>= 1
    return pop


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _reach_nb(n, k, ext, tvalid, tmask):
        size = ext.shape[0]
        reach = np.zeros((1 << n, size), dtype=np.bool_)
        for idx in range(size):
            if tvalid[idx]:
                reach[tmask[idx], idx] = True
        mod = n ** (k - 1)
        for mask in range(1 << n):
            for idx in range(size):
                if not reach[mask, idx]:
                    continue
                cand = ext[idx] & ~mask
                if cand == 0:
                    continue
                base = (idx % mod) * n
                for w in range(n):
                    if (cand >> w) & 1:
                        reach[mask | (1 << w), base + w] = True
        return reach

    @njit(cache=True)
    def _count_nb(n, k, ext, tvalid, tmask):
        size = ext.shape[0]
        cnt = np.zeros((1 << n, size), dtype=np.int64)
        for idx in range(size):
            if tvalid[idx]:
                cnt[tmask[idx], idx] = 1
        mod = n ** (k - 1)
        for mask in range(1 << n):
            for idx in range(size):
                c = cnt[mask, idx]
                if c == 0:
                    continue
                cand = ext[idx] & ~mask
                base = (idx % mod) * n
                for w in range(n):
                    if (cand >> w) & 1:
                        cnt[mask | (1 << w), base + w] += c
        return cnt

    @njit(cache=True)
    def _has_spanning_nb(n, k, ext, tvalid, tmask, stack_mask, stack_idx):
        # DFS with a visited-state table; stops at the first spanning state.
        size = ext.shape[0]
        full = (1 << n) - 1
        seen = np.zeros((1 << n, size), dtype=np.bool_)
        mod = n ** (k - 1)
        top = 0
        for idx in range(size):
            if tvalid[idx]:
                seen[tmask[idx], idx] = True
                stack_mask[top] = tmask[idx]
                stack_idx[top] = idx
                top += 1
        while top > 0:
            top -= 1
            mask = stack_mask[top]
            idx = stack_idx[top]
            if mask == full:
                return True
            cand = ext[idx] & ~mask
            base = (idx % mod) * n
            for w in range(n):
                if (cand >> w) & 1:
                    nm = mask | (1 << w)
                    ni = base + w
                    if not seen[nm, ni]:
                        seen[nm, ni] = True
                        stack_mask[top] = nm
                        stack_idx[top] = ni
                        top += 1
        return False

    @njit(parallel=True, cache=True)
    def _spanning_batch_nb(n, k, ext_batch, tvalid, tmask):
        nsamp = ext_batch.shape[0]
        size = ext_batch.shape[1]
        out = np.zeros(nsamp, dtype=np.bool_)
        for s in prange(nsamp):
            sm = np.empty((1 << n) * size + size, dtype=np.int64)
            si = np.empty((1 << n) * size + size, dtype=np.int64)
            out[s] = _has_spanning_nb(n, k, ext_batch[s], tvalid, tmask, sm, si)
        return out

    @njit(cache=True)
    def _lehmer_window(p, start, t, fact):
        rank = 0
        for a in range(t):
            smaller = 0
            for b in range(a + 1, t):
                if p[start + b] < p[start + a]:
                    smaller += 1
            rank += smaller * fact[t - 1 - a]
        return rank

    @njit(cache=True)
    def _cluster_member_one(p, r, t, fact):
        i = 0
        j = 0
        for q in range(r):
            if p[q] == r:
                j = q + 1
            elif p[q] == r - 1:
                i = q + 1
        ia = i <= t + 1 or i >= r - 2 * t
        ja = j <= t + 1 or j >= r - 2 * t
        isp = i == 1 or i == r - t or i == r
        jsp = j == 1 or j == r - t or j == r
        if ia and ja and (isp or jsp):
            return True
        if i > r - t:
            return False
        if p[r - t - 1] == r:
            if _lehmer_window(p, i, t, fact) >= _lehmer_window(p, j, t, fact):
                return True
        if p[0] == r:
            if _lehmer_window(p, j, t, fact) >= _lehmer_window(p, i, t, fact):
                return True
        return False

    @njit(cache=True)
    def _cluster_members_nb(perms, r, t):
        fact = np.ones(t + 1, dtype=np.int64)
        for q in range(1, t + 1):
            fact[q] = fact[q - 1] * q
        out = np.zeros(perms.shape[0], dtype=np.bool_)
        p = np.empty(r, dtype=np.int64)
        for s in range(perms.shape[0]):
            for q in range(r):
                p[q] = perms[s, q]
            out[s] = _cluster_member_one(p, r, t, fact)
        return out

    @njit(cache=True)
    def _cluster_count_nb(r, t):
        fact = np.ones(t + 1, dtype=np.int64)
        for q in range(1, t + 1):
            fact[q] = fact[q - 1] * q
        p = np.arange(1, r + 1).astype(np.int64)
        total = 0
        while True:
            if _cluster_member_one(p, r, t, fact):
                total += 1
            # next permutation in lexicographic order
            a = r - 2
            while a >= 0 and p[a] > p[a + 1]:
                a -= 1
            if a < 0:
                return total
            b = r - 1
            while p[b] < p[a]:
                b -= 1
            p[a], p[b] = p[b], p[a]
            lo = a + 1
            hi = r - 1
            while lo < hi:
                p[lo], p[hi] = p[hi], p[lo]
                lo += 1
                hi -= 1


# ---------------------------------------------------------------- dispatch


def reach_table(n: int, k: int, ext: np.ndarray) -> np.ndarray:
    """reach[mask, idx]: some tight path has vertex set `mask` and suffix `idx`."""
    tvalid, tmask = tuple_tables(n, k)
    ext = np.ascontiguousarray(ext, dtype=np.int64)
    if numba_enabled():
        return _reach_nb(n, k, ext, tvalid, tmask)
    return _reach_np(n, k, ext, tvalid, tmask)


def count_table(n: int, k: int, ext: np.ndarray) -> np.ndarray:
    """cnt[mask, idx]: number of tight paths with vertex set `mask`, suffix `idx`."""
    tvalid, tmask = tuple_tables(n, k)
    ext = np.ascontiguousarray(ext, dtype=np.int64)
    if numba_enabled():
        return _count_nb(n, k, ext, tvalid, tmask)
    return _count_np(n, k, ext, tvalid, tmask)


def spanning_exists_batch(n: int, k: int, ext_batch: np.ndarray) -> np.ndarray:
    tvalid, tmask = tuple_tables(n, k)
    ext_batch = np.ascontiguousarray(ext_batch, dtype=np.int64)
    if numba_enabled():
        return _spanning_batch_nb(n, k, ext_batch, tvalid, tmask)
    return _spanning_batch_np(n, k, ext_batch, tvalid, tmask)


def cluster_members(perms: np.ndarray, r: int, t: int) -> np.ndarray:
    perms = np.ascontiguousarray(perms)
    if numba_enabled():
        return _cluster_members_nb(perms.astype(np.int64), r, t)
    return _cluster_members_np(perms, r, t)


def cluster_count(r: int, t: int) -> int:
    if numba_enabled():
        return int(_cluster_count_nb(r, t))
    return _cluster_count_np(r, t)
