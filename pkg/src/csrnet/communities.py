"""Louvain modularity optimisation on an undirected, unweighted graph."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Mapping

import networkx as nx
import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import EmptyGraph, InvalidPartition

MAX_SWEEPS = 1000


@dataclass(frozen=True)
class CommunityPartition:
    assignment: dict
    modularity: float
    seed: int
    # modularity after every local-moving sweep, across all levels
    history: tuple[float, ...] = ()

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> list[list]:
        out: list[list] = [[] for _ in range(self.n_communities)]
        for node, c in self.assignment.items():
            out[c].append(node)
        return out

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["node_label", "community_id"])
            w.writerows(self.assignment.items())


def _ordered_nodes(g: nx.Graph) -> list:
    try:
        return sorted(g.nodes)
    except TypeError:
        return list(g.nodes)


def _adjacency(g: nx.Graph, nodes: list) -> sp.csr_matrix:
    idx = {n: k for k, n in enumerate(nodes)}
    pairs = [(idx[a], idx[b]) for a, b in g.edges() if a != b]
    n = len(nodes)
    if not pairs:
        return sp.csr_matrix((n, n))
    r, c = np.array(pairs).T
    a = sp.coo_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
    a = (a + a.T).tocsr()
    a.data[:] = 1.0
    return a


def modularity(g: nx.Graph, assignment: Mapping[Hashable, int]) -> float:
    """Newman-Girvan modularity, ``sum_c e_c/E - (d_c/2E)^2``."""
    missing = [n for n in g.nodes if n not in assignment]
    if missing:
        raise InvalidPartition(f"{len(missing)} node(s) without a community, e.g. {missing[0]!r}")
    edges = [(a, b) for a, b in g.edges() if a != b]
    n_edges = len(edges)
    if n_edges == 0:
        return 0.0
    internal: dict = {}
    degree: dict = {}
    for a, b in edges:
        ca, cb = assignment[a], assignment[b]
        if ca == cb:
            internal[ca] = internal.get(ca, 0) + 1
        degree[ca] = degree.get(ca, 0) + 1
        degree[cb] = degree.get(cb, 0) + 1
    two_e = 2.0 * n_edges
    return float(sum(internal.get(c, 0) / n_edges - (d / two_e) ** 2 for c, d in degree.items()))


def _level_modularity(a: sp.csr_matrix, comm: np.ndarray, m2: float) -> float:
    coo = a.tocoo()
    same = comm[coo.row] == comm[coo.col]
    nc = int(comm.max()) + 1
    inner = np.bincount(comm[coo.row[same]], weights=coo.data[same], minlength=nc)
    tot = np.bincount(comm, weights=np.asarray(a.sum(axis=1)).ravel(), minlength=nc)
    return float((inner / m2).sum() - ((tot / m2) ** 2).sum())


def louvain(g: nx.Graph, seed: int = 0, backend: str | None = None) -> CommunityPartition:
    """Greedy two-phase modularity maximisation (local moves, then aggregation).

    Nodes are visited in a fresh seeded random order on every sweep. A level
    ends when a sweep moves nothing; the algorithm stops at the first level
    where no node moved at all. Community ids are dense and numbered by first
    appearance in sorted node order.
    """
    nodes = _ordered_nodes(g)
    if not nodes:
        raise EmptyGraph("graph has no nodes")
    sweep = (_kernels.backends()[backend] if backend else _kernels).louvain_sweep
    adj = _adjacency(g, nodes)
    m2 = float(adj.sum())
    if m2 == 0:
        return CommunityPartition({n: k for k, n in enumerate(nodes)}, 0.0, seed, ())

    rng = np.random.default_rng(seed)
    membership = np.arange(len(nodes))
    history: list[float] = []
    level = adj
    while True:
        n = level.shape[0]
        k = np.asarray(level.sum(axis=1)).ravel()
        comm = np.arange(n, dtype=np.int64)
        tot = k.copy()
        indptr = level.indptr.astype(np.int64)
        indices = level.indices.astype(np.int64)
        weights = level.data.astype(np.float64)
        moved = 0
        for _ in range(MAX_SWEEPS):
            moves = sweep(indptr, indices, weights, k, rng.permutation(n).astype(np.int64),
                          comm, tot, m2)
            history.append(_level_modularity(level, comm, m2))
            moved += moves
            if moves == 0:
                break
        if moved == 0:
            break
        _, dense = np.unique(comm, return_inverse=True)
        membership = dense[membership]
        ind = sp.csr_matrix((np.ones(n), (np.arange(n), dense)), shape=(n, dense.max() + 1))
        level = (ind.T @ level @ ind).tocsr()
        level.sort_indices()

    relabel: dict[int, int] = {}
    assignment = {}
    for node, c in zip(nodes, membership):
        assignment[node] = relabel.setdefault(int(c), len(relabel))
    return CommunityPartition(assignment, modularity(g, assignment), seed, tuple(history))
