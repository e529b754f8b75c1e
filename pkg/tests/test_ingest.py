import json
from datetime import date, datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csrnet.errors import AbortIngest, ConfigError
from csrnet.ingest import (PeriodFilter, TweetRecord, descriptive_stats, extract_hashtags, filter_accounts,
                           hashtag_usage, join_firms, load_firms, load_tweets, parse_timestamp, parse_tweet,
                           write_tweets)
from csrnet.rankstats import FirmRecord


def tw(acc, day, tags=(), likes=0, rts=0, tid=None):
    ts = datetime(2020, 1, 1, tzinfo=timezone.utc) + timedelta(days=day)
    return TweetRecord(tid or f"{acc}{day}", acc, ts, hashtags=tuple(tags), like_count=likes, retweet_count=rts)


def test_parse_variants():
    a = parse_tweet({"id_str": "1", "user": {"screen_name": "ACME", "verified": True},
                     "created_at": "Wed Mar 04 10:00:00 +0100 2020", "full_text": "hi #CSR #Energia2020",
                     "favorite_count": 3})
    assert a.account_id == "acme" and a.hashtags == ("csr", "energia2020")
    assert a.timestamp == datetime(2020, 3, 4, 9, 0, tzinfo=timezone.utc)
    assert a.verified_account and a.like_count == 3
    b = parse_tweet({"tweet_id": 2, "account_id": "x", "timestamp": "2020-03-04T09:00:00Z",
                     "text": "RT @y: hello", "hashtags": ["#Tag"]})
    assert b.is_retweet and b.hashtags == ("tag",)
    c = parse_tweet({"tweet_id": 3, "account_id": "x", "timestamp": "2020-03-04",
                     "entities": {"hashtags": [{"text": "Uno"}]}})
    assert c.hashtags == ("uno",)


def test_extract_hashtags_unicode():
    assert extract_hashtags("Viva la #Sostenibilità e #CSR_2020!") == ("sostenibilità", "csr_2020")
    assert parse_timestamp("2020-03-01T00:30:00+02:00").day == 29


def test_malformed_lines(tmp_path):
    good = json.dumps({"tweet_id": "1", "account_id": "a", "timestamp": "2020-01-01T00:00:00Z"})
    p = tmp_path / "t.jsonl"
    p.write_text("\n".join([good] * 10 + ["{broken"]) + "\n")
    recs, problems = load_tweets(p)
    assert len(recs) == 10 and problems[0].line == 11
    p.write_text("\n".join([good] * 5 + ["{broken"] * 2) + "\n")
    with pytest.raises(AbortIngest):
        load_tweets(p)
    p.write_text("")
    with pytest.warns(UserWarning):
        assert load_tweets(p) == ([], [])


def test_write_roundtrip(tmp_path):
    tweets = [tw("a", 3, ["x", "y"], 4, 1), tw("b", 70)]
    write_tweets(tweets, tmp_path / "o.jsonl")
    back, problems = load_tweets(tmp_path / "o.jsonl")
    assert back == tweets and not problems


def test_period_filter():
    tweets = [tw("both", 10), tw("both", 80), tw("before", 10), tw("after", 80), tw("both", 400)]
    f = PeriodFilter()
    kept, window = filter_accounts(tweets, f)
    assert kept == ["both"] and [t.timestamp.date() for t in window] == [date(2020, 3, 21)]
    kept, _ = filter_accounts(tweets, PeriodFilter(require_straddle=False))
    assert kept == ["after", "both"]
    with pytest.raises(ConfigError):
        PeriodFilter(start=date(2020, 5, 1), end=date(2020, 4, 1))


def test_boundaries_are_inclusive():
    start = (date(2020, 3, 1) - date(2020, 1, 1)).days
    end = (date(2020, 11, 17) - date(2020, 1, 1)).days
    tweets = [tw("a", start - 1), tw("a", start), tw("b", start - 1), tw("b", end), tw("c", start - 1), tw("c", end + 1)]
    kept, window = filter_accounts(tweets)
    assert kept == ["a", "b"] and len(window) == 2


@given(st.lists(st.tuples(st.sampled_from("abcde"), st.integers(0, 400)), max_size=40))
def test_filter_idempotent(events):
    tweets = [tw(a, d, tid=str(k)) for k, (a, d) in enumerate(events)]
    kept, window = filter_accounts(tweets)
    again, window2 = filter_accounts([t for t in tweets if t.account_id in kept])
    assert again == kept and window2 == window
    assert set(t.account_id for t in window) == set(kept)


def test_stats_and_usage():
    tweets = [tw("a", 70, ["x", "y"]), tw("a", 71, ["x"]), tw("b", 72)]
    s = descriptive_stats(tweets)
    assert s.n_tweets == 3 and s.n_accounts == 2 and s.hashtag_account_fraction == 0.5
    assert s.top_hashtags == [("x", 2), ("y", 1)]
    assert hashtag_usage(tweets, lambda h: "z" if h == "y" else h) == {"a": {"x": 2, "z": 1}}


def test_firm_join(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("account_id,ateco_code,revenues\nACME,62,10\nbeta,35,\n")
    firms = load_firms(p)
    assert set(firms) == {"acme", "beta"}
    recs, unmatched = join_firms(["acme", "gamma"], firms, [tw("acme", 70, ["x"], 4, 2), tw("acme", 71, ["x", "y"], 2, 0)])
    assert unmatched == ["gamma"]
    r = recs[0]
    assert isinstance(r, FirmRecord)
    assert (r.messages, r.likes_per_message, r.retweets_per_message, r.hashtag_count) == (2.0, 3.0, 1.0, 2.0)
