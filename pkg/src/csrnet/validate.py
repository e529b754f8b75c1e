"""Statistically validated projection of a bipartite graph onto one layer.

For each pair of nodes on the projected layer the observed number of common
neighbours (V-motifs) is tested against its distribution under the fitted
BiCM, a Poisson-binomial with success probabilities ``p_ia * p_ja``. The
p-values go through Benjamini-Hochberg; surviving pairs become edges.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.stats import poisson

from . import _kernels
from .bicm import BicmModel
from .errors import ConfigError, InvalidInput
from .graph import BipartiteGraph

# exact Poisson-binomial up to this many opposite-layer nodes, Poisson above
EXACT_LIMIT = 5000


@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Every evaluated pair with its statistic, null mean, p-value and decision."""

    labels: tuple[str, ...]
    i: np.ndarray
    j: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    p_value: np.ndarray
    rejected: np.ndarray
    alpha: float
    hypothesis_count: int
    mode: str

    def __len__(self) -> int:
        return len(self.i)

    def rows(self):
        for n in range(len(self.i)):
            yield (self.labels[self.i[n]], self.labels[self.j[n]], int(self.v[n]),
                   float(self.lam[n]), float(self.p_value[n]), bool(self.rejected[n]))

    def max_gap(self, other: "ValidationReport") -> float:
        """Largest p-value difference against a report on the same pairs."""
        if len(self) == 0:
            return 0.0
        return float(np.abs(self.p_value - other.p_value).max())

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i_label", "j_label", "v", "lambda", "p_value", "rejected"])
            for a, b, v, lam, p, rej in self.rows():
                w.writerow([a, b, v, repr(lam), repr(p), int(rej)])


@dataclass(frozen=True)
class ValidatedProjection:
    """Simple undirected graph on the projected layer; edges are index pairs ``i < j``."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    def degree(self) -> np.ndarray:
        d = np.zeros(len(self.nodes), dtype=np.int64)
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    def connected_nodes(self) -> list[str]:
        """Labels of nodes with at least one validated link."""
        return [self.nodes[i] for i in np.flatnonzero(self.degree() > 0)]

    def to_networkx(self, only_connected: bool = False) -> nx.Graph:
        G = nx.Graph()
        deg = self.degree()
        G.add_nodes_from(n for k, n in enumerate(self.nodes) if not only_connected or deg[k] > 0)
        G.add_edges_from((self.nodes[i], self.nodes[j]) for i, j in self.edges)
        return G

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["source", "target"])
            w.writerows((self.nodes[i], self.nodes[j]) for i, j in self.edges)


def _cooccurrence(g: BipartiteGraph):
    m = g.rows.astype(np.int64)
    co = sp.triu(m @ m.T, k=1).tocoo()
    keep = co.data > 0
    order = np.lexsort((co.col[keep], co.row[keep]))
    return (co.row[keep][order].astype(np.int64), co.col[keep][order].astype(np.int64),
            co.data[keep][order].astype(np.int64))


def v_motifs(g: BipartiteGraph, layer: str = "top") -> dict[tuple[int, int], int]:
    """Common-neighbour counts for every pair ``i < j`` that shares at least one neighbour."""
    g = _oriented(g, layer)
    i, j, v = _cooccurrence(g)
    return {(int(a), int(b)): int(c) for a, b, c in zip(i, j, v)}


def poisson_binomial_pvalue(probabilities, v_observed: int) -> float:
    """``P(V >= v_observed)`` for a sum of independent Bernoulli trials."""
    q = np.asarray(probabilities, dtype=float)
    if ((q < 0) | (q > 1)).any():
        raise InvalidInput("probabilities must lie in [0, 1]")
    if v_observed <= 0:
        return 1.0
    return float(_kernels.poibin_tail(q, int(v_observed))[int(v_observed)])


def poisson_pvalue(lam: float, v_observed: int) -> float:
    if v_observed <= 0:
        return 1.0
    return float(poisson.sf(v_observed - 1, lam))


def fdr_select(p_values, alpha: float = 0.05, m: int | None = None) -> np.ndarray:
    """Benjamini-Hochberg rejections as a boolean mask aligned with ``p_values``.

    ``m`` is the number of hypotheses (defaults to ``len(p_values)``). Ties in
    the sort are broken by input position.
    """
    p = np.asarray(p_values, dtype=float)
    if not 0 < alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)")
    m = len(p) if m is None else int(m)
    if m < len(p):
        raise ConfigError("hypothesis count smaller than the number of p-values")
    rejected = np.zeros(len(p), dtype=bool)
    if len(p) == 0:
        return rejected
    order = np.argsort(p, kind="stable")
    ranks = np.arange(1, len(p) + 1)
    ok = np.flatnonzero(p[order] <= ranks * alpha / m)
    if len(ok):
        rejected[order[: ok[-1] + 1]] = True
    return rejected


def _oriented(g: BipartiteGraph, layer: str) -> BipartiteGraph:
    if layer == "top":
        return g
    if layer == "bottom":
        return g.transpose()
    raise ConfigError(f"layer must be 'top' or 'bottom', got {layer!r}")


def resolve_mode(mode: str, n_opposite: int) -> str:
    if mode == "auto":
        return "exact" if n_opposite <= EXACT_LIMIT else "poisson"
    if mode not in ("exact", "poisson"):
        raise ConfigError(f"mode must be exact, poisson or auto, got {mode!r}")
    return mode


def pair_pvalues(g: BipartiteGraph, p: np.ndarray, mode: str):
    """Observed V, null means and p-values for every co-occurring pair.

    ``p`` is the link-probability matrix for the projected layer. Nodes with
    identical probability rows share one null distribution, so the DP runs
    once per pair of distinct rows.
    """
    i, j, v = _cooccurrence(g)
    if len(i) == 0:
        empty = np.zeros(0)
        return i, j, v, empty, empty
    rows, inverse = np.unique(p, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    ri, rj = inverse[i], inverse[j]
    if len(rows) <= 2048:
        lam = (rows @ rows.T)[ri, rj]
    else:
        lam = np.concatenate([np.einsum("ka,ka->k", rows[ri[s:s + 4096]], rows[rj[s:s + 4096]])
                              for s in range(0, len(ri), 4096)])
    if mode == "poisson":
        pv = poisson.sf(v - 1, lam)
    else:
        pv = np.empty(len(i))
        lo, hi = np.minimum(ri, rj), np.maximum(ri, rj)
        key = lo * len(rows) + hi
        order = np.argsort(key, kind="stable")
        bounds = np.flatnonzero(np.diff(key[order])) + 1
        for grp in np.split(order, bounds):
            a, b = lo[grp[0]], hi[grp[0]]
            tail = _kernels.poibin_tail(rows[a] * rows[b], int(v[grp].max()))
            pv[grp] = tail[v[grp]]
    return i, j, v, lam, np.clip(pv, 0.0, 1.0)


def validate_projection(g: BipartiteGraph, model: BicmModel, alpha: float = 0.05,
                        mode: str = "auto", layer: str = "top",
                        hypothesis_count: int | None = None):
    """Test every co-occurring pair and keep the FDR survivors.

    Returns ``(ValidationReport, ValidatedProjection)``. Pairs with no common
    neighbour are never materialised; by default they are also left out of
    the hypothesis count.
    """
    if model.n_top != g.n_top or model.n_bottom != g.n_bottom:
        raise InvalidInput("model was not fitted on a graph of this shape")
    if layer == "bottom":
        p = model.probabilities().T
    else:
        p = model.probabilities()
    g = _oriented(g, layer)
    mode = resolve_mode(mode, g.n_bottom)
    i, j, v, lam, pv = pair_pvalues(g, p, mode)
    m = len(i) if hypothesis_count is None else int(hypothesis_count)
    rejected = fdr_select(pv, alpha, m) if len(i) else np.zeros(0, dtype=bool)
    report = ValidationReport(g.top_labels, i, j, v, lam, pv, rejected, alpha, m, mode)
    edges = tuple((int(a), int(b)) for a, b in zip(i[rejected], j[rejected]))
    return report, ValidatedProjection(g.top_labels, edges)


def write_graphml(projection: ValidatedProjection, path: str | Path,
                  node_attrs: dict[str, dict] | None = None, only_connected: bool = True) -> None:
    """GraphML export; ``node_attrs`` maps node label to attribute dict."""
    G = projection.to_networkx(only_connected=only_connected)
    for node, deg in G.degree():
        G.nodes[node]["degree"] = int(deg)
    for node, attrs in (node_attrs or {}).items():
        if node in G:
            G.nodes[node].update({k: v for k, v in attrs.items() if v is not None})
    nx.write_graphml(G, str(path), encoding="utf-8")
