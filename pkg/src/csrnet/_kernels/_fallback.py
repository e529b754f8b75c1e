"""Pure-Python/numpy versions of the hot kernels.

Semantics match ``_core.pyx`` exactly; the Louvain sweep performs the same
floating-point operations in the same order, so both backends yield
identical partitions.
"""
from __future__ import annotations

import numpy as np

MOVE_EPS = 1e-12


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _bounded_levenshtein(a: str, b: str, maxlen: int, threshold: float) -> int:
    """Edit distance, or -1 as soon as distance/maxlen >= threshold is certain."""
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        row_min = i
        for j, cb in enumerate(b, 1):
            v = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
            cur.append(v)
            if v < row_min:
                row_min = v
        if row_min / maxlen >= threshold:
            return -1
        prev = cur
    d = prev[-1]
    return d if d / maxlen < threshold else -1


def close_pairs(strings, eligible, threshold):
    """All pairs i < j, at least one eligible, with relative distance < threshold.

    Returns three arrays (i, j, relative_distance).
    """
    n = len(strings)
    lengths = [len(s) for s in strings]
    out_i, out_j, out_d = [], [], []
    for i in range(n):
        si, li = strings[i], lengths[i]
        if li == 0:
            continue
        for j in range(i + 1, n):
            if not (eligible[i] or eligible[j]):
                continue
            lj = lengths[j]
            if lj == 0:
                continue
            maxlen = li if li > lj else lj
            if abs(li - lj) / maxlen >= threshold:
                continue
            d = _bounded_levenshtein(si, strings[j], maxlen, threshold)
            if d >= 0:
                out_i.append(i)
                out_j.append(j)
                out_d.append(d / maxlen)
    return (
        np.asarray(out_i, dtype=np.int64),
        np.asarray(out_j, dtype=np.int64),
        np.asarray(out_d, dtype=np.float64),
    )


def poibin_tail(q, vmax: int) -> np.ndarray:
    """Tail probabilities ``t[v] = P(V >= v)`` for ``v = 0..vmax``.

    ``V`` is a sum of independent Bernoulli(q[a]). The DP keeps ``f[v]`` as an
    absorbing ">= vmax" state, so tails are sums of non-negative terms.
    """
    q = np.asarray(q, dtype=np.float64)
    vmax = int(vmax)
    if vmax <= 0:
        return np.ones(1)
    f = np.zeros(vmax + 1)
    f[0] = 1.0
    for qa in q:
        if qa == 0.0:
            continue
        r = 1.0 - qa
        top = f[vmax] + qa * f[vmax - 1]
        f[1:vmax] = r * f[1:vmax] + qa * f[0 : vmax - 1]
        f[vmax] = top
        f[0] = r * f[0]
    t = np.empty(vmax + 1)
    acc = 0.0
    for v in range(vmax, 0, -1):
        acc += f[v]
        t[v] = acc
    t[0] = 1.0
    return np.clip(t, 0.0, 1.0)


def louvain_sweep(indptr, indices, weights, k, order, comm, tot, m2) -> int:
    """One local-moving sweep in visit ``order``; mutates ``comm`` and ``tot``."""
    n = len(k)
    nw = np.zeros(n)
    seen = np.zeros(n, dtype=bool)
    moves = 0
    for i in order:
        ci = comm[i]
        ki = k[i]
        touched = []
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j == i:
                continue
            c = comm[j]
            if not seen[c]:
                seen[c] = True
                nw[c] = 0.0
                touched.append(c)
            nw[c] += weights[p]
        tot[ci] -= ki
        best = ci
        best_gain = (nw[ci] if seen[ci] else 0.0) - tot[ci] * ki / m2
        for c in touched:
            gain = nw[c] - tot[c] * ki / m2
            if gain > best_gain + MOVE_EPS:
                best_gain = gain
                best = c
        for c in touched:
            seen[c] = False
        tot[best] += ki
        if best != ci:
            comm[i] = best
            moves += 1
    return moves
