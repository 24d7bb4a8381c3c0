"""Hot numeric kernels: Levenshtein and Zhang-Shasha tree edit distance.

Both kernels ship in two variants: a numba ``@njit`` build and a pure
numpy/Python fallback. Set ``SEMDIFF_NO_NUMBA=1`` to force the fallback
(it is also used automatically when numba is unavailable). The two paths
are bit-identical; ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("SEMDIFF_NO_NUMBA", "") not in ("", "0")

if not _DISABLED:
    try:
        from numba import njit
    except ImportError:
        _DISABLED = True

USE_NUMBA = not _DISABLED


def levenshtein_numpy(a: np.ndarray, b: np.ndarray) -> int:
    """Row-vectorized edit distance over codepoint arrays.

    Deletion chains need a running minimum, not a one-step update:
    row[j] = min over k<=j of c[k] + (j - k), where c is the row after
    the insert/substitute step. Computed as accumulate-min of c[k]-k.
    """
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 0:
        return len(a)
    idx = np.arange(len(b) + 1, dtype=np.int64)
    prev = idx.copy()
    cur = np.empty_like(prev)
    for ch in a:
        cur[0] = prev[0] + 1
        np.minimum(prev[1:] + 1, prev[:-1] + (b != ch), out=cur[1:])
        cur -= idx
        np.minimum.accumulate(cur, out=cur)
        cur += idx
        prev, cur = cur, prev
    return int(prev[-1])


def _levenshtein_loops(a, b):
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1, dtype=np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(n):
        cur[0] = i + 1
        ai = a[i]
        for j in range(m):
            cost = 0 if ai == b[j] else 1
            best = prev[j] + cost
            if prev[j + 1] + 1 < best:
                best = prev[j + 1] + 1
            if cur[j] + 1 < best:
                best = cur[j] + 1
            cur[j + 1] = best
        prev, cur = cur, prev
    return prev[m]


def _ted_loops(labels1, lmld1, keyroots1, labels2, lmld2, keyroots2):
    # Zhang-Shasha over postorder arrays; lmld[i] = leftmost leaf
    # descendant of node i, keyroots ascending. Unit edit costs.
    n1 = len(labels1)
    n2 = len(labels2)
    td = np.zeros((n1, n2), dtype=np.int64)
    fd = np.zeros((n1 + 2, n2 + 2), dtype=np.int64)
    for ii in range(len(keyroots1)):
        i = keyroots1[ii]
        li = lmld1[i]
        for jj in range(len(keyroots2)):
            j = keyroots2[jj]
            lj = lmld2[j]
            m = i - li + 2
            n = j - lj + 2
            fd[0, 0] = 0
            for x in range(1, m):
                fd[x, 0] = fd[x - 1, 0] + 1
            for y in range(1, n):
                fd[0, y] = fd[0, y - 1] + 1
            for x in range(1, m):
                for y in range(1, n):
                    if lmld1[x + li - 1] == li and lmld2[y + lj - 1] == lj:
                        cost = 0 if labels1[x + li - 1] == labels2[y + lj - 1] else 1
                        best = fd[x - 1, y] + 1
                        if fd[x, y - 1] + 1 < best:
                            best = fd[x, y - 1] + 1
                        if fd[x - 1, y - 1] + cost < best:
                            best = fd[x - 1, y - 1] + cost
                        fd[x, y] = best
                        td[x + li - 1, y + lj - 1] = best
                    else:
                        p = lmld1[x + li - 1] - li
                        q = lmld2[y + lj - 1] - lj
                        best = fd[x - 1, y] + 1
                        if fd[x, y - 1] + 1 < best:
                            best = fd[x, y - 1] + 1
                        dsub = fd[p, q] + td[x + li - 1, y + lj - 1]
                        if dsub < best:
                            best = dsub
                        fd[x, y] = best
    return td[n1 - 1, n2 - 1]


if USE_NUMBA:
    _levenshtein_njit = njit(cache=True, nogil=True)(_levenshtein_loops)
    _ted_njit = njit(cache=True, nogil=True)(_ted_loops)


def levenshtein(a: np.ndarray, b: np.ndarray) -> int:
    """Character-level edit distance between two uint32 codepoint arrays."""
    if USE_NUMBA:
        return int(_levenshtein_njit(a, b))
    return levenshtein_numpy(a, b)


def tree_edit_distance(
    labels1: np.ndarray,
    lmld1: np.ndarray,
    keyroots1: np.ndarray,
    labels2: np.ndarray,
    lmld2: np.ndarray,
    keyroots2: np.ndarray,
) -> int:
    """Ordered tree edit distance (unit costs) over postorder encodings."""
    if USE_NUMBA:
        return int(
            _ted_njit(labels1, lmld1, keyroots1, labels2, lmld2, keyroots2)
        )
    return int(_ted_loops(labels1, lmld1, keyroots1, labels2, lmld2, keyroots2))
