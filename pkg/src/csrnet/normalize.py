"""Hashtag typo merging by digit-aware relative edit distance.

Digits are removed before comparing (``pasqua2020`` and ``pasqua2021`` are the
same subject). A pair is only compared by distance when at least one side is
a dictionary word, which keeps unrelated acronyms (``ibm``/``bmw``) apart.
Mergeable pairs are closed transitively; each cluster is represented by its
most frequent member.
"""
from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import ConfigError, InvalidInput

_DIGITS = re.compile(r"\d+")


@dataclass(frozen=True)
class NormalizationConfig:
    relative_threshold: float = 0.20
    wordlists: frozenset[str] = field(default_factory=frozenset)
    enable_digit_strip: bool = True
    prefix_match: bool = False

    def __post_init__(self):
        if not 0 < self.relative_threshold < 1:
            raise ConfigError("relative_threshold must lie in (0, 1)")
        object.__setattr__(self, "wordlists", frozenset(w.casefold() for w in self.wordlists))

    def is_word(self, s: str) -> bool:
        if s in self.wordlists:
            return True
        return self.prefix_match and any(w.startswith(s) or s.startswith(w)
                                         for w in self.wordlists if len(w) >= 3)


def load_wordlist(path: str | Path) -> set[str]:
    with open(path, encoding="utf-8") as fh:
        return {line.strip().casefold() for line in fh if line.strip() and not line.startswith("#")}


@dataclass(frozen=True)
class MergeMap:
    canonical: dict[str, str]
    clusters: dict[str, frozenset[str]]
    # relative distance of every merged raw form to its representative
    distances: dict[str, float] = field(default_factory=dict)

    def __call__(self, hashtag: str) -> str:
        return self.canonical.get(hashtag, hashtag)

    def apply(self, hashtags: Iterable[str]) -> list[str]:
        return [self(h) for h in hashtags]

    def merges(self) -> list[tuple[str, str, float]]:
        """``(raw, canonical, distance)`` for every hashtag that changes."""
        return sorted((raw, can, self.distances.get(raw, 0.0))
                      for raw, can in self.canonical.items() if raw != can)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["raw", "canonical", "distance"])
            for raw, can, d in self.merges():
                w.writerow([raw, can, repr(d)])


def strip_digits(h: str) -> str:
    if not h:
        raise InvalidInput("empty hashtag")
    return _DIGITS.sub("", h)


def relative_edit_distance(a: str, b: str) -> float:
    """Levenshtein distance over the longer length, in [0, 1]."""
    if not a or not b:
        raise InvalidInput("relative edit distance needs two non-empty strings")
    return _kernels.levenshtein(a, b) / max(len(a), len(b))


def _stripped(h: str, cfg: NormalizationConfig) -> str:
    return strip_digits(h) if cfg.enable_digit_strip else h


def is_mergeable(a: str, b: str, cfg: NormalizationConfig | None = None) -> bool:
    cfg = cfg or NormalizationConfig()
    sa, sb = _stripped(a.casefold(), cfg), _stripped(b.casefold(), cfg)
    if not sa or not sb:
        return False
    if sa == sb:
        return True
    if not (cfg.is_word(sa) or cfg.is_word(sb)):
        return False
    return relative_edit_distance(sa, sb) < cfg.relative_threshold


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def build_merge_map(hashtags: Mapping[str, int] | Iterable[str],
                    cfg: NormalizationConfig | None = None) -> MergeMap:
    """Cluster hashtags into connected components of the mergeable relation.

    ``hashtags`` is a frequency mapping or an iterable with repetitions.
    """
    cfg = cfg or NormalizationConfig()
    counts = Counter()
    if isinstance(hashtags, Mapping):
        for h, c in hashtags.items():
            counts[h.casefold()] += int(c)
    else:
        counts.update(h.casefold() for h in hashtags)
    raw = sorted(counts)
    stripped = [_stripped(h, cfg) for h in raw]

    # hashtags sharing a non-empty stripped form merge outright
    forms = sorted({s for s in stripped if s})
    form_idx = {s: k for k, s in enumerate(forms)}
    uf = _UnionFind(len(forms))
    eligible = np.array([cfg.is_word(s) for s in forms], dtype=np.uint8)
    pi, pj, _ = _kernels.close_pairs(forms, eligible, cfg.relative_threshold)
    for a, b in zip(pi.tolist(), pj.tolist()):
        uf.union(a, b)

    groups: dict[object, list[str]] = {}
    for h, s in zip(raw, stripped):
        key = uf.find(form_idx[s]) if s else ("raw", h)
        groups.setdefault(key, []).append(h)

    canonical: dict[str, str] = {}
    clusters: dict[str, frozenset[str]] = {}
    distances: dict[str, float] = {}
    for members in groups.values():
        rep = min(members, key=lambda h: (-counts[h], h))
        clusters[rep] = frozenset(members)
        rep_s = _stripped(rep, cfg)
        for h in members:
            canonical[h] = rep
            if h != rep:
                distances[h] = relative_edit_distance(_stripped(h, cfg), rep_s)
    return MergeMap(canonical, clusters, distances)


def normalize_corpus(hashtags: Iterable[str], cfg: NormalizationConfig | None = None) -> list[str]:
    hashtags = [h.casefold() for h in hashtags]
    return build_merge_map(hashtags, cfg).apply(hashtags)
