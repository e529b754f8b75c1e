# cython: language_level=3
"""Compiled hot kernels. See ``_fallback.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double MOVE_EPS = 1e-12


cdef Py_ssize_t _lev(const int* a, Py_ssize_t la, const int* b, Py_ssize_t lb,
                     Py_ssize_t* prev, Py_ssize_t* cur, double maxlen,
                     double threshold, bint bounded) noexcept nogil:
    cdef Py_ssize_t i, j, v, row_min, sub
    cdef Py_ssize_t* tmp
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        cur[0] = i
        row_min = i
        for j in range(1, lb + 1):
            sub = prev[j - 1] + (0 if a[i - 1] == b[j - 1] else 1)
            v = prev[j] + 1
            if cur[j - 1] + 1 < v:
                v = cur[j - 1] + 1
            if sub < v:
                v = sub
            cur[j] = v
            if v < row_min:
                row_min = v
        if bounded and row_min / maxlen >= threshold:
            return -1
        tmp = prev
        prev = cur
        cur = tmp
    v = prev[lb]
    if bounded and v / maxlen >= threshold:
        return -1
    return v


def _encode(strings):
    lengths = np.fromiter((len(s) for s in strings), dtype=np.int64, count=len(strings))
    offsets = np.zeros(len(strings) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    codes = np.fromiter((ord(ch) for s in strings for ch in s), dtype=np.int32,
                        count=int(offsets[-1]))
    return codes, offsets


def levenshtein(str a, str b):
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    if lb == 0:
        return la
    codes, offsets = _encode([a, b])
    cdef int[::1] c = codes
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cur = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t d
    try:
        d = _lev(&c[0], la, &c[la], lb, prev, cur, 1.0, 1.0, False)
    finally:
        free(prev)
        free(cur)
    return int(d)


def close_pairs(strings, eligible, double threshold):
    cdef Py_ssize_t n = len(strings)
    if n == 0:
        return (np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, np.float64))
    codes_np, offsets_np = _encode(strings)
    if codes_np.size == 0:
        codes_np = np.zeros(1, dtype=np.int32)
    cdef int[::1] codes = codes_np
    cdef long long[::1] off = offsets_np
    cdef cnp.uint8_t[::1] elig = np.ascontiguousarray(eligible, dtype=np.uint8)
    cdef Py_ssize_t longest = int(np.max(np.diff(offsets_np)))
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((longest + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cur = <Py_ssize_t*> malloc((longest + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t i, j, li, lj, d, diff
    cdef double maxlen
    out_i, out_j, out_d = [], [], []
    try:
        for i in range(n):
            li = off[i + 1] - off[i]
            if li == 0:
                continue
            for j in range(i + 1, n):
                if not (elig[i] or elig[j]):
                    continue
                lj = off[j + 1] - off[j]
                if lj == 0:
                    continue
                maxlen = li if li > lj else lj
                diff = li - lj if li > lj else lj - li
                if diff / maxlen >= threshold:
                    continue
                if li >= lj:
                    d = _lev(&codes[off[i]], li, &codes[off[j]], lj, prev, cur,
                             maxlen, threshold, True)
                else:
                    d = _lev(&codes[off[j]], lj, &codes[off[i]], li, prev, cur,
                             maxlen, threshold, True)
                if d >= 0:
                    out_i.append(i)
                    out_j.append(j)
                    out_d.append(d / maxlen)
    finally:
        free(prev)
        free(cur)
    return (
        np.asarray(out_i, dtype=np.int64),
        np.asarray(out_j, dtype=np.int64),
        np.asarray(out_d, dtype=np.float64),
    )


def poibin_tail(q, Py_ssize_t vmax):
    if vmax <= 0:
        return np.ones(1)
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    f_np = np.zeros(vmax + 1)
    cdef double[::1] f = f_np
    cdef Py_ssize_t a, v, n = qv.shape[0]
    cdef double qa, r, acc
    f[0] = 1.0
    with nogil:
        for a in range(n):
            qa = qv[a]
            if qa == 0.0:
                continue
            r = 1.0 - qa
            f[vmax] = f[vmax] + qa * f[vmax - 1]
            for v in range(vmax - 1, 0, -1):
                f[v] = r * f[v] + qa * f[v - 1]
            f[0] = r * f[0]
    t_np = np.empty(vmax + 1)
    cdef double[::1] t = t_np
    acc = 0.0
    for v in range(vmax, 0, -1):
        acc += f[v]
        t[v] = acc
    t[0] = 1.0
    return np.clip(t_np, 0.0, 1.0)


def louvain_sweep(indptr, indices, weights, k, order, comm, tot, double m2):
    cdef long long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef long long[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] kv = np.ascontiguousarray(k, dtype=np.float64)
    cdef long long[::1] od = np.ascontiguousarray(order, dtype=np.int64)
    cdef long long[::1] cm = comm
    cdef double[::1] tt = tot
    cdef Py_ssize_t n = kv.shape[0]
    nw_np = np.zeros(n)
    seen_np = np.zeros(n, dtype=np.uint8)
    touched_np = np.zeros(n, dtype=np.int64)
    cdef double[::1] nw = nw_np
    cdef cnp.uint8_t[::1] seen = seen_np
    cdef long long[::1] touched = touched_np
    cdef Py_ssize_t idx, i, p, j, c, ci, best, nt, t
    cdef double ki, gain, best_gain
    cdef Py_ssize_t moves = 0
    with nogil:
        for idx in range(od.shape[0]):
            i = od[idx]
            ci = cm[i]
            ki = kv[i]
            nt = 0
            for p in range(ip[i], ip[i + 1]):
                j = ix[p]
                if j == i:
                    continue
                c = cm[j]
                if not seen[c]:
                    seen[c] = 1
                    nw[c] = 0.0
                    touched[nt] = c
                    nt += 1
                nw[c] += w[p]
            tt[ci] -= ki
            best = ci
            best_gain = (nw[ci] if seen[ci] else 0.0) - tt[ci] * ki / m2
            for t in range(nt):
                c = touched[t]
                gain = nw[c] - tt[c] * ki / m2
                if gain > best_gain + MOVE_EPS:
                    best_gain = gain
                    best = c
            for t in range(nt):
                seen[touched[t]] = 0
            tt[best] += ki
            if best != ci:
                cm[i] = best
                moves += 1
    return moves
