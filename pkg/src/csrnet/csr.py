"""CSR-dimension tagging and the community-level CSR tables.

Three table shapes are produced: accounts using each dimension per community,
hashtag shares per community (both over distinct hashtags and over
occurrences), and average likes/retweets of messages carrying a dimension.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InvalidInput, InvalidPartition

DIMENSIONS = ("environmental", "social", "economic")
NETWORK = "all"


@dataclass(frozen=True)
class CsrLexicon:
    entries: dict[str, str]

    def __post_init__(self):
        clean = {}
        for kw, dim in self.entries.items():
            kw, dim = kw.strip().casefold(), dim.strip().casefold()
            if dim not in DIMENSIONS:
                raise InvalidInput(f"unknown CSR dimension {dim!r} for {kw!r}")
            if clean.get(kw, dim) != dim:
                raise InvalidInput(f"keyword {kw!r} mapped to two dimensions")
            clean[kw] = dim
        object.__setattr__(self, "entries", clean)

    def tag(self, hashtag: str) -> str | None:
        return self.entries.get(hashtag.casefold())

    def keywords(self, dimension: str) -> list[str]:
        return sorted(k for k, d in self.entries.items() if d == dimension)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_csv(cls, path: str | Path) -> "CsrLexicon":
        with open(path, newline="", encoding="utf-8") as fh:
            return cls._from_rows(csv.DictReader(fh))

    @classmethod
    def default(cls) -> "CsrLexicon":
        """The keyword list seeded from the published per-community keyword table."""
        text = resources.files("csrnet").joinpath("data/csr_lexicon.csv").read_text(encoding="utf-8")
        return cls._from_rows(csv.DictReader(text.splitlines()))

    @classmethod
    def _from_rows(cls, rows) -> "CsrLexicon":
        entries: dict[str, str] = {}
        for row in rows:
            kw, dim = row["keyword"].strip().casefold(), row["dimension"].strip().casefold()
            if entries.get(kw, dim) != dim:
                raise InvalidInput(f"keyword {kw!r} mapped to two dimensions")
            entries[kw] = dim
        return cls(entries)


def tag_hashtag(h: str, lex: CsrLexicon) -> str | None:
    return lex.tag(h)


@dataclass(frozen=True)
class CsrAccountStats:
    community: int
    accounts: int
    csr_total: int
    by_dimension: dict[str, int]


@dataclass(frozen=True)
class CsrOccurrenceStats:
    community: int | str
    hashtag_occurrences: int
    distinct_hashtags: int
    occurrence_pct: dict[str, float]
    distinct_pct: dict[str, float]
    empty: bool = False


@dataclass(frozen=True)
class EngagementRow:
    community: int | str
    dimension: str
    messages: int
    avg_likes: float
    avg_retweets: float
    empty: bool = False


@dataclass(frozen=True)
class EngagementStats:
    rows: list[EngagementRow]
    # averages over messages with any hashtag, and with any CSR hashtag
    baseline_all: EngagementRow | None = None
    baseline_csr: EngagementRow | None = None
    by_key: dict = field(default_factory=dict, repr=False)

    def get(self, community, dimension) -> EngagementRow:
        return self.by_key[(community, dimension)]


def _assignment(partition) -> Mapping[str, int]:
    return getattr(partition, "assignment", partition)


def _community_ids(assignment: Mapping[str, int]) -> list[int]:
    return sorted(set(assignment.values()))


def _as_counter(hashtags) -> Counter:
    if isinstance(hashtags, Mapping):
        return Counter({h.casefold(): int(c) for h, c in hashtags.items()})
    return Counter(h.casefold() for h in hashtags)


def community_csr_accounts(partition, usage: Mapping[str, Iterable[str] | Mapping[str, int]],
                           lex: CsrLexicon) -> list[CsrAccountStats]:
    """Per community: accounts, accounts using any CSR hashtag, and per dimension."""
    assignment = _assignment(partition)
    for acc in usage:
        if acc not in assignment:
            raise InvalidPartition(f"account {acc!r} is not in the partition")
    size = Counter(assignment.values())
    total = Counter()
    per_dim = {d: Counter() for d in DIMENSIONS}
    for acc, tags in usage.items():
        c = assignment[acc]
        dims = {lex.tag(h) for h in _as_counter(tags)} - {None}
        if dims:
            total[c] += 1
        for d in dims:
            per_dim[d][c] += 1
    return [CsrAccountStats(c, size[c], total[c], {d: per_dim[d][c] for d in DIMENSIONS})
            for c in _community_ids(assignment)]


def _occurrence_row(key, counts: Counter, lex: CsrLexicon) -> CsrOccurrenceStats:
    occ = sum(counts.values())
    distinct = len(counts)
    occ_dim = Counter()
    distinct_dim = Counter()
    for h, n in counts.items():
        d = lex.tag(h) or "none"
        occ_dim[d] += n
        distinct_dim[d] += 1
    dims = DIMENSIONS + ("none",)
    if occ == 0:
        zeros = {d: 0.0 for d in dims}
        return CsrOccurrenceStats(key, 0, 0, zeros, dict(zeros), empty=True)
    return CsrOccurrenceStats(
        key, occ, distinct,
        {d: 100.0 * occ_dim[d] / occ for d in dims},
        {d: 100.0 * distinct_dim[d] / distinct for d in dims},
    )


def community_csr_occurrences(partition, usage: Mapping[str, Mapping[str, int] | Iterable[str]],
                              lex: CsrLexicon) -> list[CsrOccurrenceStats]:
    """Dimension shares of hashtags, network-wide first, then per community.

    ``usage`` maps each account to hashtag occurrence counts. Accounts outside
    the partition are ignored.
    """
    assignment = _assignment(partition)
    per_comm = {c: Counter() for c in _community_ids(assignment)}
    network = Counter()
    for acc, tags in usage.items():
        if acc not in assignment:
            continue
        counts = _as_counter(tags)
        per_comm[assignment[acc]].update(counts)
        network.update(counts)
    return [_occurrence_row(NETWORK, network, lex)] + [
        _occurrence_row(c, per_comm[c], lex) for c in per_comm]


def _engagement_row(key, dim, likes: list[float], rts: list[float]) -> EngagementRow:
    if not likes:
        return EngagementRow(key, dim, 0, 0.0, 0.0, empty=True)
    return EngagementRow(key, dim, len(likes), sum(likes) / len(likes), sum(rts) / len(rts))


def engagement(messages, partition, lex: CsrLexicon) -> EngagementStats:
    """Average likes and retweets of messages carrying each CSR dimension.

    A message counts once for every dimension it carries. Only messages by
    accounts in the partition are used.
    """
    assignment = _assignment(partition)
    comms = _community_ids(assignment)
    buckets: dict = {}
    any_tag: tuple[list, list] = ([], [])
    any_csr: tuple[list, list] = ([], [])
    for msg in messages:
        acc = msg.account_id
        if acc not in assignment or not msg.hashtags:
            continue
        likes, rts = float(msg.like_count), float(msg.retweet_count)
        any_tag[0].append(likes)
        any_tag[1].append(rts)
        dims = {lex.tag(h) for h in msg.hashtags} - {None}
        if dims:
            any_csr[0].append(likes)
            any_csr[1].append(rts)
        for d in dims:
            for key in (NETWORK, assignment[acc]):
                lk, rt = buckets.setdefault((key, d), ([], []))
                lk.append(likes)
                rt.append(rts)
    rows = []
    for key in [NETWORK] + comms:
        for d in DIMENSIONS:
            lk, rt = buckets.get((key, d), ([], []))
            rows.append(_engagement_row(key, d, lk, rt))
    return EngagementStats(
        rows,
        _engagement_row(NETWORK, "any", *any_tag),
        _engagement_row(NETWORK, "csr", *any_csr),
        {(r.community, r.dimension): r for r in rows},
    )


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_account_table(rows: list[CsrAccountStats], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["community", "accounts", "csr_total", "env", "soc", "econ"])
        for r in rows:
            w.writerow([r.community, r.accounts, r.csr_total, *(r.by_dimension[d] for d in DIMENSIONS)])


def write_occurrence_table(rows: list[CsrOccurrenceStats], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["community", "hashtags", "env_pct", "soc_pct", "econ_pct",
                    "distinct_hashtags", "env_distinct_pct", "soc_distinct_pct",
                    "econ_distinct_pct", "empty"])
        for r in rows:
            w.writerow([r.community, r.hashtag_occurrences,
                        *(_fmt(r.occurrence_pct[d]) for d in DIMENSIONS),
                        r.distinct_hashtags, *(_fmt(r.distinct_pct[d]) for d in DIMENSIONS),
                        int(r.empty)])


def write_engagement_table(stats: EngagementStats, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["community", "likes_env", "likes_soc", "likes_econ",
                    "retweets_env", "retweets_soc", "retweets_econ",
                    "messages_env", "messages_soc", "messages_econ"])
        keys = list(dict.fromkeys(r.community for r in stats.rows))
        for key in keys:
            rows = [stats.get(key, d) for d in DIMENSIONS]
            w.writerow([key, *(_fmt(r.avg_likes) for r in rows),
                        *(_fmt(r.avg_retweets) for r in rows), *(r.messages for r in rows)])
        for base in (stats.baseline_all, stats.baseline_csr):
            w.writerow([f"baseline_{base.dimension}", _fmt(base.avg_likes), "", "",
                        _fmt(base.avg_retweets), "", "", base.messages, "", ""])
