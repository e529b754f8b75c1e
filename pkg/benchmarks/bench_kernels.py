"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

import networkx as nx
import numpy as np

from csrnet import _kernels
from csrnet.normalize import NormalizationConfig


def _hashtags(n: int, rng) -> list[str]:
    letters = list("abcdefghilmnoprstuvz")
    return sorted({"".join(rng.choice(letters, rng.integers(4, 14))) for _ in range(n)})


def cases(rng):
    tags = _hashtags(600, rng)
    eligible = (rng.random(len(tags)) < 0.3).astype(np.uint8)
    q = rng.random(2000) * 0.2
    g = nx.ring_of_cliques(80, 6)
    g.add_edges_from(nx.gnp_random_graph(480, 0.01, seed=1).edges())
    a = nx.to_scipy_sparse_array(g, nodelist=sorted(g), format="csr", dtype=float)
    k = np.asarray(a.sum(axis=1)).ravel()
    order = rng.permutation(len(k)).astype(np.int64)
    thr = NormalizationConfig().relative_threshold

    def sweep(mod):
        comm = np.arange(len(k), dtype=np.int64)
        mod.louvain_sweep(a.indptr.astype(np.int64), a.indices.astype(np.int64), a.data, k, order,
                          comm, k.copy(), float(k.sum()))

    return {
        "close_pairs (600 hashtags)": lambda mod: mod.close_pairs(tags, eligible, thr),
        "poibin_tail (2000 trials, v<=60)": lambda mod: mod.poibin_tail(q, 60),
        "louvain_sweep (480 nodes)": sweep,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _kernels.backends()
    print(f"{'kernel':36s}" + "".join(f"{b:>12s}" for b in backends) + "     speed-up")
    for name, fn in cases(np.random.default_rng(0)).items():
        times = {}
        for b, mod in backends.items():
            best = np.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                fn(mod)
                best = min(best, time.perf_counter() - t0)
            times[b] = best
        ratio = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{name:36s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends) + f"   {ratio:8.1f}x")


if __name__ == "__main__":
    main()
