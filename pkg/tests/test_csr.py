import csv

import pytest

from csrnet.csr import (DIMENSIONS, CsrLexicon, community_csr_accounts, community_csr_occurrences,
                        engagement, write_account_table, write_engagement_table, write_occurrence_table)
from csrnet.errors import InvalidInput, InvalidPartition

import csr_case as case

LEX = CsrLexicon.default()


def mean(xs):
    return sum(xs) / len(xs)


def test_default_lexicon():
    assert LEX.tag("Energia") == "environmental"
    assert LEX.tag("formazione") == "social"
    assert LEX.tag("tax") == "economic"
    assert LEX.tag("covid") is None
    assert len(LEX) == 28
    assert set(LEX.entries.values()) == set(DIMENSIONS)


def test_lexicon_validation(tmp_path):
    with pytest.raises(InvalidInput):
        CsrLexicon({"x": "political"})
    p = tmp_path / "lex.csv"
    p.write_text("keyword,dimension\nx,social\nx,economic\n")
    with pytest.raises(InvalidInput):
        CsrLexicon.from_csv(p)


def test_account_table():
    rows = community_csr_accounts(case.PARTITION, case.USAGE, LEX)
    got = {r.community: (r.accounts, r.csr_total, *(r.by_dimension[d] for d in DIMENSIONS)) for r in rows}
    assert got == case.ACCOUNTS


def test_account_table_rejects_unknown_account():
    with pytest.raises(InvalidPartition):
        community_csr_accounts({"a1": 0}, case.USAGE, LEX)


def test_occurrence_table_and_divergence():
    rows = community_csr_occurrences(case.PARTITION, case.USAGE, LEX)
    assert rows[0].community == "all"
    for r in rows:
        occ, occ_dim, distinct, dist_dim = case.OCCURRENCES[r.community]
        assert (r.hashtag_occurrences, r.distinct_hashtags) == (occ, distinct)
        for d in DIMENSIONS:
            assert r.occurrence_pct[d] == 100.0 * occ_dim[d] / occ
            assert r.distinct_pct[d] == 100.0 * dist_dim[d] / distinct
    network = rows[0]
    # a CSR hashtag that is rare in volume still counts fully among distinct hashtags
    assert network.distinct_pct["economic"] > 4 * network.occurrence_pct["economic"]


def test_occurrence_empty_community():
    rows = community_csr_occurrences({"a1": 0, "q": 1}, {"a1": {"energia": 2}}, LEX)
    assert rows[2].empty and rows[2].hashtag_occurrences == 0
    assert all(v == 0.0 for v in rows[2].occurrence_pct.values())


def test_engagement_table():
    stats = engagement(case.MESSAGES, case.PARTITION, LEX)
    for (key, dim), msgs in case.ENGAGEMENT.items():
        row = stats.get(key, dim)
        assert row.messages == len(msgs)
        assert row.empty == (not msgs)
        if msgs:
            assert row.avg_likes == mean([m[0] for m in msgs])
            assert row.avg_retweets == mean([m[1] for m in msgs])
    assert stats.baseline_all.avg_likes == mean([m[0] for m in case.BASELINE_ANY])
    assert stats.baseline_all.avg_retweets == mean([m[1] for m in case.BASELINE_ANY])
    assert stats.baseline_csr.avg_likes == mean([m[0] for m in case.BASELINE_CSR])


def test_writers(tmp_path):
    write_account_table(community_csr_accounts(case.PARTITION, case.USAGE, LEX), tmp_path / "a.csv")
    write_occurrence_table(community_csr_occurrences(case.PARTITION, case.USAGE, LEX), tmp_path / "o.csv")
    write_engagement_table(engagement(case.MESSAGES, case.PARTITION, LEX), tmp_path / "e.csv")
    a = list(csv.DictReader(open(tmp_path / "a.csv")))
    assert a[0] == {"community": "0", "accounts": "2", "csr_total": "2", "env": "2", "soc": "1", "econ": "0"}
    o = list(csv.DictReader(open(tmp_path / "o.csv")))
    assert o[0]["community"] == "all" and o[0]["econ_pct"] == f"{100 / 33:.6f}"
    e = list(csv.DictReader(open(tmp_path / "e.csv")))
    assert e[-2]["community"] == "baseline_any" and e[-2]["likes_env"] == f"{29:.6f}"
