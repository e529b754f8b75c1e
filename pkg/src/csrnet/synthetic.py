"""Synthetic bipartite graphs for tests, benchmarks and the bundled fixture."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import BipartiteGraph


def random_bipartite(n_top: int, n_bottom: int, density: float = 0.05, seed: int = 0,
                     heterogeneity: float = 0.0) -> BipartiteGraph:
    """Independent edges; ``heterogeneity > 0`` draws lognormal node fitnesses.

    Edge probabilities are ``density * a_i * b_a`` clipped to 1, with fitness
    vectors normalised to mean one.
    """
    rng = np.random.default_rng(seed)
    a = np.ones(n_top)
    b = np.ones(n_bottom)
    if heterogeneity > 0:
        a = rng.lognormal(0.0, heterogeneity, n_top)
        b = rng.lognormal(0.0, heterogeneity, n_bottom)
        a /= a.mean()
        b /= b.mean()
    p = np.clip(density * np.outer(a, b), 0.0, 1.0)
    m = (rng.random((n_top, n_bottom)) < p).astype(np.int8)
    return BipartiteGraph.from_biadjacency(sp.csr_matrix(m))


def planted_blocks(n_blocks: int, top_per_block: int, bottom_per_block: int,
                   p_in: float, p_out: float, seed: int = 0,
                   n_background: int = 0, p_background: float = 0.0):
    """Block-diagonal bipartite graph; returns ``(graph, top block labels)``.

    ``n_background`` extra bottom nodes are open to every top node with
    probability ``p_background``.
    """
    rng = np.random.default_rng(seed)
    tb = np.repeat(np.arange(n_blocks), top_per_block)
    bb = np.repeat(np.arange(n_blocks), bottom_per_block)
    p = np.where(tb[:, None] == bb[None, :], p_in, p_out)
    p = np.hstack([p, np.full((len(tb), n_background), p_background)])
    m = (rng.random(p.shape) < p).astype(np.int8)
    top = [f"t{k:04d}" for k in range(len(tb))]
    bottom = [f"b{k:04d}" for k in range(p.shape[1])]
    return BipartiteGraph.from_biadjacency(sp.csr_matrix(m), top, bottom), tb
