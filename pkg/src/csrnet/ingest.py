"""Loading local tweet archives and firm metadata; activity-window filtering."""
from __future__ import annotations

import csv
import json
import re
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable

from .errors import AbortIngest, ConfigError, InvalidInput
from .rankstats import FirmRecord

HASHTAG_RE = re.compile(r"#(\w+)")
MAX_MALFORMED = 0.10


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    account_id: str
    timestamp: datetime
    text: str = ""
    hashtags: tuple[str, ...] = ()
    is_retweet: bool = False
    like_count: int = 0
    retweet_count: int = 0
    verified_account: bool = False

    def to_json(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "account_id": self.account_id,
            "timestamp": self.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": self.text,
            "hashtags": list(self.hashtags),
            "is_retweet": self.is_retweet,
            "like_count": self.like_count,
            "retweet_count": self.retweet_count,
            "verified_account": self.verified_account,
        }


@dataclass(frozen=True)
class IngestProblem:
    line: int
    message: str


@dataclass(frozen=True)
class PeriodFilter:
    start: date = date(2020, 3, 1)
    end: date = date(2020, 11, 17)
    require_straddle: bool = True

    def __post_init__(self):
        if not self.start < self.end:
            raise ConfigError("period start must precede its end")


@dataclass(frozen=True)
class DatasetSummary:
    n_tweets: int
    n_accounts: int
    retweet_fraction: float
    verified_fraction: float
    hashtag_account_fraction: float
    top_hashtags: list[tuple[str, int]]


def parse_timestamp(value) -> datetime:
    if isinstance(value, (int, float)):
        return datetime.fromtimestamp(value, tz=timezone.utc)
    s = str(value).strip()
    try:
        ts = datetime.fromisoformat(s.replace("Z", "+00:00"))
    except ValueError:
        ts = datetime.strptime(s, "%a %b %d %H:%M:%S %z %Y")
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def extract_hashtags(text: str) -> tuple[str, ...]:
    return tuple(h.casefold() for h in HASHTAG_RE.findall(text))


def _count(obj: dict, *keys) -> int:
    for k in keys:
        if obj.get(k) is not None:
            v = int(obj[k])
            if v < 0:
                raise ValueError(f"negative {k}")
            return v
    return 0


def parse_tweet(obj: dict) -> TweetRecord:
    """Build a record from one JSON object; raises ``ValueError``/``KeyError`` when malformed."""
    user = obj.get("user") or {}
    account = obj.get("account_id") or user.get("screen_name") or user.get("id_str")
    if not account:
        raise KeyError("account_id")
    tweet_id = obj.get("tweet_id") or obj.get("id_str") or obj.get("id")
    if tweet_id in (None, ""):
        raise KeyError("tweet_id")
    stamp = obj.get("timestamp") or obj.get("created_at")
    if stamp is None:
        raise KeyError("timestamp")
    text = obj.get("text") or obj.get("full_text") or ""
    tags = obj.get("hashtags")
    if tags is None:
        tags = (obj.get("entities") or {}).get("hashtags")
    if tags is None:
        hashtags = extract_hashtags(text)
    else:
        hashtags = tuple((t["text"] if isinstance(t, dict) else str(t)).lstrip("#").casefold()
                         for t in tags)
    retweet = obj.get("is_retweet")
    if retweet is None:
        retweet = "retweeted_status" in obj or text.startswith("RT @")
    verified = obj.get("verified_account")
    if verified is None:
        verified = bool(user.get("verified", False))
    return TweetRecord(
        tweet_id=str(tweet_id),
        account_id=str(account).casefold(),
        timestamp=parse_timestamp(stamp),
        text=text,
        hashtags=tuple(h for h in hashtags if h),
        is_retweet=bool(retweet),
        like_count=_count(obj, "like_count", "favorite_count"),
        retweet_count=_count(obj, "retweet_count"),
        verified_account=bool(verified),
    )


def load_tweets(path: str | Path) -> tuple[list[TweetRecord], list[IngestProblem]]:
    """Read a JSON Lines archive; returns the records and the malformed lines.

    More than 10% malformed lines aborts with :class:`AbortIngest`.
    """
    records: list[TweetRecord] = []
    problems: list[IngestProblem] = []
    seen = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            seen += 1
            try:
                records.append(parse_tweet(json.loads(line)))
            except (ValueError, KeyError, TypeError, AttributeError) as exc:
                problems.append(IngestProblem(lineno, f"{type(exc).__name__}: {exc}"))
    if seen == 0:
        warnings.warn(f"{path} contains no tweets", stacklevel=2)
    elif len(problems) > MAX_MALFORMED * seen:
        raise AbortIngest(f"{len(problems)} of {seen} lines malformed in {path}")
    return records, problems


def write_tweets(tweets: Iterable[TweetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            fh.write(json.dumps(t.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def filter_accounts(tweets: Iterable[TweetRecord], f: PeriodFilter | None = None):
    """Keep accounts active before and inside the window; return them and their window tweets.

    With ``require_straddle`` an account needs a tweet strictly before
    ``f.start`` and one within ``[f.start, f.end]``. Returns
    ``(sorted retained accounts, window tweets in input order)``.
    """
    f = f or PeriodFilter()
    tweets = list(tweets)
    before, inside = set(), set()
    for t in tweets:
        d = t.timestamp.date()
        if d < f.start:
            before.add(t.account_id)
        elif d <= f.end:
            inside.add(t.account_id)
    retained = inside & before if f.require_straddle else inside
    window = [t for t in tweets if t.account_id in retained and f.start <= t.timestamp.date() <= f.end]
    return sorted(retained), window


def descriptive_stats(tweets: Iterable[TweetRecord], top_k: int = 10) -> DatasetSummary:
    tweets = list(tweets)
    accounts = {t.account_id for t in tweets}
    verified = {t.account_id for t in tweets if t.verified_account}
    tagging = {t.account_id for t in tweets if t.hashtags}
    counts = Counter(h for t in tweets for h in t.hashtags)
    top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    n, na = len(tweets), len(accounts)
    return DatasetSummary(
        n_tweets=n,
        n_accounts=na,
        retweet_fraction=sum(t.is_retweet for t in tweets) / n if n else 0.0,
        verified_fraction=len(verified) / na if na else 0.0,
        hashtag_account_fraction=len(tagging) / na if na else 0.0,
        top_hashtags=top,
    )


def hashtag_usage(tweets: Iterable[TweetRecord], normalize=None) -> dict[str, Counter]:
    """Per-account hashtag occurrence counts, optionally through a merge map."""
    usage: dict[str, Counter] = defaultdict(Counter)
    for t in tweets:
        for h in t.hashtags:
            usage[t.account_id][normalize(h) if normalize else h] += 1
    return dict(usage)


def load_firms(path: str | Path) -> dict[str, FirmRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        firms = {}
        for lineno, row in enumerate(csv.DictReader(fh), 2):
            if not row.get("account_id"):
                raise InvalidInput(f"{path}:{lineno}: missing account_id")
            rec = FirmRecord.from_row(row)
            rec.account_id = rec.account_id.casefold()
            firms[rec.account_id] = rec
    return firms


def join_firms(accounts: Iterable[str], firms: dict[str, FirmRecord],
               tweets: Iterable[TweetRecord] = ()):
    """Attach tweet-derived activity to firm records.

    Returns ``(records, unmatched_accounts)``; accounts without metadata are
    reported, not dropped silently. Message counts, per-message likes and
    retweets, and distinct hashtags come from ``tweets``.
    """
    per_acc: dict[str, list[TweetRecord]] = defaultdict(list)
    for t in tweets:
        per_acc[t.account_id].append(t)
    records, unmatched = [], []
    for acc in sorted(set(accounts)):
        rec = firms.get(acc)
        if rec is None:
            unmatched.append(acc)
            continue
        mine = per_acc.get(acc, [])
        if mine:
            n = len(mine)
            rec = replace(rec, messages=float(n),
                          likes_per_message=sum(t.like_count for t in mine) / n,
                          retweets_per_message=sum(t.retweet_count for t in mine) / n,
                          hashtag_count=float(len({h for t in mine for h in t.hashtags})))
        records.append(rec)
    return records, unmatched
