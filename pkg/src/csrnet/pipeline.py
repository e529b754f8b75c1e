"""Stage-by-stage pipeline with persisted artifacts and per-stage manifests.

Each stage reads only files written by earlier stages (or the configured
inputs), writes its outputs atomically, and records a manifest with content
hashes, the configuration and timings under ``<out>/manifest/``.
"""
from __future__ import annotations

import contextlib
import csv
import hashlib
import json
import logging
import os
import tempfile
import time
from collections import Counter
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .bicm import fit_graph, load_model, model_to_json
from .communities import louvain
from .config import PipelineConfig
from .csr import (CsrLexicon, community_csr_accounts, community_csr_occurrences, engagement,
                  write_account_table, write_engagement_table, write_occurrence_table)
from .errors import InsufficientData, StageDependencyError
from .graph import build_graph
from .ingest import (descriptive_stats, filter_accounts, hashtag_usage, join_firms, load_firms,
                     load_tweets, parse_tweet, write_tweets)
from .normalize import NormalizationConfig, build_merge_map, load_wordlist
from .rankstats import FirmRecord, correlation_matrix
from .validate import ValidatedProjection, validate_projection, write_graphml

log = logging.getLogger(__name__)

STAGES = ("ingest", "normalize", "build", "fit", "validate", "communities", "csr", "correlations")


@contextlib.contextmanager
def atomic_path(path: Path):
    """Yield a temporary path in the target directory; rename over ``path`` on success."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_csv(path: Path, header, rows) -> None:
    with atomic_path(path) as tmp, open(tmp, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _write_json(path: Path, doc) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n",
                       encoding="utf-8")


def _read_tweets(path: Path):
    with open(path, encoding="utf-8") as fh:
        return [parse_tweet(json.loads(line)) for line in fh if line.strip()]


class Pipeline:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)

    def path(self, stage: str, name: str) -> Path:
        return self.out / stage / name

    def _need(self, stage: str, *paths: Path) -> None:
        for p in paths:
            if not p.is_file():
                raise StageDependencyError(stage, p)

    def run(self, stage: str) -> dict[str, Path]:
        if stage == "all":
            self.cfg.check_inputs()
            produced = {}
            for s in STAGES:
                produced.update(self.run(s))
            return produced
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        started = time.perf_counter()
        inputs, outputs = getattr(self, f"_{stage}")()
        elapsed = time.perf_counter() - started
        self._manifest(stage, inputs, outputs, elapsed)
        log.info("stage %s done in %.2fs", stage, elapsed)
        return {f"{stage}/{p.name}": p for p in outputs}

    def _manifest(self, stage: str, inputs: list[Path], outputs: list[Path], elapsed: float) -> None:
        def rel(p: Path) -> str:
            try:
                return p.resolve().relative_to(self.out.resolve()).as_posix()
            except ValueError:
                return p.as_posix()

        _write_json(self.out / "manifest" / f"{stage}.json", {
            "stage": stage,
            "inputs": {rel(p): sha256(p) for p in inputs},
            "outputs": {rel(p): sha256(p) for p in outputs},
            "config": self.cfg.echo(),
            "kernel_backend": _kernels.BACKEND,
            "seconds": round(elapsed, 4),
        })

    # stages -------------------------------------------------------------

    def _ingest(self):
        cfg = self.cfg
        cfg.check_inputs()
        tweets, problems = load_tweets(cfg.tweets)
        accounts, window = filter_accounts(tweets, cfg.period)
        out_tweets = self.path("ingest", "tweets.jsonl")
        with atomic_path(out_tweets) as tmp:
            write_tweets(window, tmp)
        per_acc = Counter(t.account_id for t in window)
        tagging = {t.account_id for t in window if t.hashtags}
        accounts_csv = self.path("ingest", "accounts.csv")
        _write_csv(accounts_csv, ["account_id", "tweets", "uses_hashtags"],
                   [(a, per_acc[a], int(a in tagging)) for a in accounts])
        problems_csv = self.path("ingest", "problems.csv")
        _write_csv(problems_csv, ["line", "message"], [(p.line, p.message) for p in problems])
        full, win = descriptive_stats(tweets), descriptive_stats(window)
        stats = self.path("ingest", "stats.json")
        _write_json(stats, {
            "archive": asdict(full),
            "window": asdict(win),
            "retained_accounts": len(accounts),
            "hashtag_using_accounts": len(tagging),
            "malformed_lines": len(problems),
        })
        outputs = [out_tweets, accounts_csv, problems_csv, stats]
        inputs = [cfg.tweets]
        if cfg.firms is not None:
            firms = load_firms(cfg.firms)
            records, unmatched = join_firms(accounts, firms, window)
            firms_csv = self.path("ingest", "firms.csv")
            names = list(FirmRecord.__dataclass_fields__)
            _write_csv(firms_csv, names, [[_cell(getattr(r, n)) for n in names] for r in records])
            unmatched_csv = self.path("ingest", "unmatched_accounts.csv")
            _write_csv(unmatched_csv, ["account_id"], [(a,) for a in unmatched])
            outputs += [firms_csv, unmatched_csv]
            inputs.append(cfg.firms)
        return inputs, outputs

    def _merge_map(self):
        rows = _read_csv(self.path("normalize", "merge_map.csv"))
        table = {r["raw"]: r["canonical"] for r in rows}
        return lambda h: table.get(h, h)

    def _normalize(self):
        cfg = self.cfg
        tweets_path = self.path("ingest", "tweets.jsonl")
        self._need("normalize", tweets_path)
        tweets = _read_tweets(tweets_path)
        words: set[str] = set()
        for w in cfg.wordlists:
            words |= load_wordlist(w)
        ncfg = NormalizationConfig(cfg.relative_threshold, frozenset(words), cfg.enable_digit_strip)
        mm = build_merge_map(Counter(h for t in tweets for h in t.hashtags), ncfg)
        merge_csv = self.path("normalize", "merge_map.csv")
        _write_csv(merge_csv, ["raw", "canonical", "distance"],
                   [(raw, can, repr(mm.distances.get(raw, 0.0)))
                    for raw, can in sorted(mm.canonical.items())])
        review_csv = self.path("normalize", "merge_review.csv")
        _write_csv(review_csv, ["raw", "canonical", "distance"],
                   [(r, c, repr(d)) for r, c, d in mm.merges()])
        usage = hashtag_usage(tweets, mm)
        usage_csv = self.path("normalize", "usage.csv")
        _write_csv(usage_csv, ["account_id", "hashtag", "count"],
                   [(a, h, n) for a in sorted(usage) for h, n in sorted(usage[a].items())])
        return [tweets_path, *cfg.wordlists], [merge_csv, review_csv, usage_csv]

    def _usage(self) -> dict[str, Counter]:
        usage: dict[str, Counter] = {}
        for r in _read_csv(self.path("normalize", "usage.csv")):
            usage.setdefault(r["account_id"], Counter())[r["hashtag"]] = int(r["count"])
        return usage

    def _build(self):
        usage_csv = self.path("normalize", "usage.csv")
        accounts_csv = self.path("ingest", "accounts.csv")
        self._need("build", usage_csv, accounts_csv)
        usage = self._usage()
        accounts = [r["account_id"] for r in _read_csv(accounts_csv)]
        extra = accounts if self.cfg.include_hashtagless_accounts else ()
        g = build_graph(((a, h) for a, tags in usage.items() for h in tags), top_labels=extra)
        edges_csv = self.path("build", "edges.csv")
        _write_csv(edges_csv, ["account_id", "hashtag"], g.edge_records())
        deg_top = np.diff(g.rows.indptr)
        top_csv = self.path("build", "top_nodes.csv")
        _write_csv(top_csv, ["account_id", "degree", "isolated"],
                   [(lab, int(d), int(d == 0)) for lab, d in zip(g.top_labels, deg_top)])
        deg_bot = np.diff(g.cols.indptr)
        bottom_csv = self.path("build", "bottom_nodes.csv")
        _write_csv(bottom_csv, ["hashtag", "degree"],
                   [(lab, int(d)) for lab, d in zip(g.bottom_labels, deg_bot)])
        return [usage_csv, accounts_csv], [edges_csv, top_csv, bottom_csv]

    def _graph(self, stage: str):
        edges_csv = self.path("build", "edges.csv")
        top_csv = self.path("build", "top_nodes.csv")
        self._need(stage, edges_csv, top_csv)
        records = [(r["account_id"], r["hashtag"]) for r in _read_csv(edges_csv)]
        tops = [r["account_id"] for r in _read_csv(top_csv)]
        return build_graph(records, top_labels=tops), [edges_csv, top_csv]

    def _fit(self):
        g, inputs = self._graph("fit")
        model = fit_graph(g, self.cfg.solver)
        model_json = self.path("fit", "model.json")
        with atomic_path(model_json) as tmp:
            tmp.write_text(model_to_json(model), encoding="utf-8")
        return inputs, [model_json]

    def _validate(self):
        model_json = self.path("fit", "model.json")
        self._need("validate", model_json)
        g, inputs = self._graph("validate")
        model = load_model(model_json)
        report, proj = validate_projection(g, model, self.cfg.alpha, self.cfg.mode,
                                           hypothesis_count=self.cfg.hypothesis_count)
        report_csv = self.path("validate", "report.csv")
        with atomic_path(report_csv) as tmp:
            report.to_csv(tmp)
        edges_csv = self.path("validate", "projection_edges.csv")
        with atomic_path(edges_csv) as tmp:
            proj.to_csv(tmp)
        summary = self.path("validate", "summary.json")
        _write_json(summary, {
            "mode": report.mode,
            "alpha": report.alpha,
            "hypothesis_count": report.hypothesis_count,
            "pairs_tested": len(report),
            "validated_links": len(proj.edges),
            "validated_nodes": len(proj.connected_nodes()),
        })
        return inputs + [model_json], [report_csv, edges_csv, summary]

    def _projection(self) -> ValidatedProjection:
        rows = _read_csv(self.path("validate", "projection_edges.csv"))
        nodes = sorted({r["source"] for r in rows} | {r["target"] for r in rows})
        idx = {n: k for k, n in enumerate(nodes)}
        edges = tuple(sorted((min(idx[r["source"]], idx[r["target"]]),
                              max(idx[r["source"]], idx[r["target"]])) for r in rows))
        return ValidatedProjection(tuple(nodes), edges)

    def _firms(self) -> dict[str, FirmRecord]:
        p = self.path("ingest", "firms.csv")
        if not p.is_file():
            return {}
        return {r["account_id"]: FirmRecord.from_row(r) for r in _read_csv(p)}

    def _communities(self):
        edges_csv = self.path("validate", "projection_edges.csv")
        usage_csv = self.path("normalize", "usage.csv")
        self._need("communities", edges_csv, usage_csv)
        proj = self._projection()
        partition_csv = self.path("communities", "partition.csv")
        summary_csv = self.path("communities", "summary.csv")
        graphml = self.path("communities", "projection.graphml")
        if not proj.nodes:
            _write_csv(partition_csv, ["node_label", "community_id"], [])
            _write_csv(summary_csv, ["community_id", "size", "top_hashtags"], [])
            with atomic_path(graphml) as tmp:
                write_graphml(proj, tmp)
            return [edges_csv, usage_csv], [partition_csv, summary_csv, graphml]
        part = louvain(proj.to_networkx(), seed=self.cfg.seed)
        _write_csv(partition_csv, ["node_label", "community_id"], sorted(part.assignment.items()))
        usage = self._usage()
        rows = []
        for c, members in enumerate(part.communities()):
            counts = Counter()
            for m in members:
                counts.update(usage.get(m, {}))
            top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[: self.cfg.top_k_hashtags]
            rows.append((c, len(members), ";".join(f"{h}:{n}" for h, n in top)))
        _write_csv(summary_csv, ["community_id", "size", "top_hashtags"], rows)
        firms = self._firms()
        attrs = {}
        for node, c in part.assignment.items():
            f = firms.get(node)
            attrs[node] = {"community": c,
                           "guo_type": f.guo_type if f else None,
                           "ateco_code": f.ateco_code if f else None}
        with atomic_path(graphml) as tmp:
            write_graphml(proj, tmp, attrs)
        inputs = [edges_csv, usage_csv]
        if self.path("ingest", "firms.csv").is_file():
            inputs.append(self.path("ingest", "firms.csv"))
        return inputs, [partition_csv, summary_csv, graphml]

    def _partition(self) -> dict[str, int]:
        return {r["node_label"]: int(r["community_id"])
                for r in _read_csv(self.path("communities", "partition.csv"))}

    def _lexicon(self) -> CsrLexicon:
        return CsrLexicon.from_csv(self.cfg.lexicon) if self.cfg.lexicon else CsrLexicon.default()

    def _csr(self):
        partition_csv = self.path("communities", "partition.csv")
        usage_csv = self.path("normalize", "usage.csv")
        tweets_path = self.path("ingest", "tweets.jsonl")
        merge_csv = self.path("normalize", "merge_map.csv")
        self._need("csr", partition_csv, usage_csv, tweets_path, merge_csv)
        part = self._partition()
        usage = {a: c for a, c in self._usage().items() if a in part}
        lex = self._lexicon()
        norm = self._merge_map()
        tweets = [replace(t, hashtags=tuple(norm(h) for h in t.hashtags))
                  for t in _read_tweets(tweets_path)]
        acc_csv = self.path("csr", "accounts_by_dimension.csv")
        occ_csv = self.path("csr", "hashtag_shares.csv")
        eng_csv = self.path("csr", "engagement.csv")
        with atomic_path(acc_csv) as tmp:
            write_account_table(community_csr_accounts(part, usage, lex), tmp)
        with atomic_path(occ_csv) as tmp:
            write_occurrence_table(community_csr_occurrences(part, usage, lex), tmp)
        with atomic_path(eng_csv) as tmp:
            write_engagement_table(engagement(tweets, part, lex), tmp)
        inputs = [partition_csv, usage_csv, tweets_path, merge_csv]
        if self.cfg.lexicon:
            inputs.append(self.cfg.lexicon)
        return inputs, [acc_csv, occ_csv, eng_csv]

    def _correlations(self):
        firms_csv = self.path("ingest", "firms.csv")
        partition_csv = self.path("communities", "partition.csv")
        self._need("correlations", firms_csv, partition_csv)
        firms = list(self._firms().values())
        validated = set(self._partition())
        sets = {"all": firms, "validated": [f for f in firms if f.account_id in validated]}
        outputs, notes = [], {}
        for name, records in sets.items():
            for code in (None, *self.cfg.ateco_filters):
                tag = name if code is None else f"{name}_ateco{code}"
                try:
                    cm = correlation_matrix(records, ateco_filter=code)
                except InsufficientData as exc:
                    notes[tag] = str(exc)
                    continue
                wide, long = self.path("correlations", f"{tag}.csv"), self.path("correlations", f"{tag}_long.csv")
                with atomic_path(wide) as tmp:
                    cm.to_csv(tmp)
                with atomic_path(long) as tmp:
                    cm.to_long_csv(tmp)
                outputs += [wide, long]
        skipped = self.path("correlations", "skipped.json")
        _write_json(skipped, notes)
        return [firms_csv, partition_csv], outputs + [skipped]


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if np.isnan(v) else repr(v)
    return v
