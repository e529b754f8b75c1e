"""Immutable sparse bipartite graph between accounts (top) and hashtags (bottom)."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EmptyGraph, InvalidInput


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Binary biadjacency structure with row- and column-major views.

    Build it with :func:`build_graph` or :meth:`from_biadjacency`; the
    constructor does no validation.
    """

    top_labels: tuple[str, ...]
    bottom_labels: tuple[str, ...]
    rows: sp.csr_matrix
    cols: sp.csc_matrix = field(repr=False)

    @classmethod
    def from_biadjacency(cls, matrix, top_labels: Sequence[str] | None = None,
                         bottom_labels: Sequence[str] | None = None) -> "BipartiteGraph":
        m = sp.csr_matrix(matrix, dtype=np.int8)
        m.data[:] = 1
        m.sum_duplicates()
        m.data = np.minimum(m.data, 1).astype(np.int8)
        m.eliminate_zeros()
        m.sort_indices()
        n_top, n_bot = m.shape
        if top_labels is None:
            top_labels = [f"t{i}" for i in range(n_top)]
        if bottom_labels is None:
            bottom_labels = [f"b{a}" for a in range(n_bot)]
        if len(top_labels) != n_top or len(bottom_labels) != n_bot:
            raise InvalidInput("label count does not match biadjacency shape")
        return cls(tuple(top_labels), tuple(bottom_labels), m, m.tocsc())

    @property
    def n_top(self) -> int:
        return self.rows.shape[0]

    @property
    def n_bottom(self) -> int:
        return self.rows.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.shape

    @property
    def n_edges(self) -> int:
        return int(self.rows.nnz)

    def neighbors_of_top(self, i: int) -> np.ndarray:
        return self.rows.indices[self.rows.indptr[i]:self.rows.indptr[i + 1]]

    def neighbors_of_bottom(self, a: int) -> np.ndarray:
        return self.cols.indices[self.cols.indptr[a]:self.cols.indptr[a + 1]]

    def edges(self) -> list[tuple[int, int]]:
        coo = self.rows.tocoo()
        return sorted(zip(coo.row.tolist(), coo.col.tolist()))

    def edge_records(self) -> list[tuple[str, str]]:
        return [(self.top_labels[i], self.bottom_labels[a]) for i, a in self.edges()]

    def to_dense(self) -> np.ndarray:
        return self.rows.toarray().astype(np.int8)

    @property
    def isolated_top(self) -> np.ndarray:
        """Boolean flags for accounts without any hashtag."""
        return np.diff(self.rows.indptr) == 0

    @property
    def isolated_bottom(self) -> np.ndarray:
        return np.diff(self.cols.indptr) == 0

    def transpose(self) -> "BipartiteGraph":
        """Swap the layers."""
        return BipartiteGraph(self.bottom_labels, self.top_labels,
                              self.cols.T.tocsr(), self.rows.T.tocsc())


@dataclass(frozen=True)
class DegreeSequence:
    top_degrees: np.ndarray
    bottom_degrees: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.top_degrees.sum())


@dataclass(frozen=True)
class DegreeClasses:
    """Nodes grouped by degree: ``{degree: (multiplicity, member_indices)}`` per layer."""

    top_classes: dict[int, tuple[int, np.ndarray]]
    bottom_classes: dict[int, tuple[int, np.ndarray]]

    def to_degree_sequence(self, n_top: int, n_bottom: int) -> DegreeSequence:
        def expand(classes, n):
            out = np.zeros(n, dtype=np.int64)
            for deg, (_, members) in classes.items():
                out[members] = deg
            return out

        return DegreeSequence(expand(self.top_classes, n_top),
                              expand(self.bottom_classes, n_bottom))


def build_graph(records: Iterable[tuple[str, str]], top_labels: Iterable[str] = (),
                bottom_labels: Iterable[str] = ()) -> BipartiteGraph:
    """Build a graph from ``(account, hashtag)`` incidence records.

    Labels are case-folded, duplicates collapse to a single edge, and both
    layers are ordered lexicographically. ``top_labels``/``bottom_labels``
    add nodes that have no records (they stay isolated and flagged).
    """
    pairs = set()
    for account, hashtag in records:
        account, hashtag = str(account).casefold(), str(hashtag).casefold()
        if not account or not hashtag:
            raise InvalidInput(f"empty label in record {(account, hashtag)!r}")
        pairs.add((account, hashtag))
    if not pairs:
        raise EmptyGraph("no incidence records")
    tops = sorted({a for a, _ in pairs} | {str(t).casefold() for t in top_labels})
    bots = sorted({h for _, h in pairs} | {str(b).casefold() for b in bottom_labels})
    top_idx = {t: i for i, t in enumerate(tops)}
    bot_idx = {b: a for a, b in enumerate(bots)}
    ordered = sorted(pairs)
    r = np.fromiter((top_idx[a] for a, _ in ordered), dtype=np.int64, count=len(ordered))
    c = np.fromiter((bot_idx[h] for _, h in ordered), dtype=np.int64, count=len(ordered))
    m = sp.csr_matrix((np.ones(len(ordered), dtype=np.int8), (r, c)), shape=(len(tops), len(bots)))
    return BipartiteGraph.from_biadjacency(m, tops, bots)


def degrees(g: BipartiteGraph) -> DegreeSequence:
    top = np.diff(g.rows.indptr).astype(np.int64)
    bottom = np.diff(g.cols.indptr).astype(np.int64)
    return DegreeSequence(top, bottom)


def _classes(values: np.ndarray) -> dict[int, tuple[int, np.ndarray]]:
    uniq, inverse = np.unique(values, return_inverse=True)
    return {int(d): (int((inverse == c).sum()), np.flatnonzero(inverse == c))
            for c, d in enumerate(uniq)}


def reduce_by_degree(g: BipartiteGraph | DegreeSequence) -> DegreeClasses:
    seq = g if isinstance(g, DegreeSequence) else degrees(g)
    return DegreeClasses(_classes(np.asarray(seq.top_degrees)),
                         _classes(np.asarray(seq.bottom_degrees)))


def read_edgelist(path: str | Path, delimiter: str = ",") -> BipartiteGraph:
    with open(path, newline="", encoding="utf-8") as fh:
        records = [(row[0], row[1]) for row in csv.reader(fh, delimiter=delimiter) if row]
    return build_graph(records)


def write_edgelist(g: BipartiteGraph, path: str | Path, delimiter: str = ",") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerows(g.edge_records())
