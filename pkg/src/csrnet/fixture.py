"""Generator for the small bundled corpus used by ``csrnet --fixture`` and the tests.

Three groups of firm accounts tweet mostly from their own hashtag pool, with
spelling variants, digit suffixes, accounts that only appear after the
window opens, accounts that never use hashtags and a couple of broken lines.
"""
from __future__ import annotations

import csv
import json
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from .rankstats import GUO_TYPES

POOLS = {
    "verde": ["sostenibilità", "energia", "rifiuti", "acqua", "emissioni", "biodiversità",
              "ambiente", "clima", "riciclo", "sustainability", "greendeal", "mobilità",
              "rinnovabili", "natura", "energy", "economiacircolare"],
    "sociale": ["formazione", "dipendenti", "comunità", "diversity", "stakeholder", "istruzione",
                "welfare", "inclusione", "volontariato", "salute", "training", "community",
                "parità", "lavoro", "giovani", "territorio"],
    "mercato": ["csr", "tax", "responsabilità", "bilancio", "finanza", "investimenti",
                "mercati", "crescita", "export", "innovazione", "risultati", "borsa",
                "governance", "dividendi", "fintech", "digitale"],
}
SHARED = ["covid19", "italia", "news", "iorestoacasa"]
# spelling variants that the normaliser should fold into a pool hashtag
VARIANTS = {"sostenibilita": "verde", "sostenibilità2020": "verde", "energie": "verde",
            "formazion": "sociale", "dipendente": "sociale", "investimento": "mercato",
            "innovazion": "mercato"}
ATECO = {"verde": ["35", "38", "62"], "sociale": ["86", "85", "62"], "mercato": ["64", "66", "62"]}

ITALIAN = ["sostenibilità", "energia", "rifiuti", "acqua", "emissioni", "biodiversità", "ambiente",
           "clima", "riciclo", "formazione", "dipendenti", "comunità", "istruzione", "inclusione",
           "volontariato", "salute", "responsabilità", "bilancio", "finanza", "investimenti",
           "mercati", "crescita", "innovazione", "italia"]
ENGLISH = ["sustainability", "diversity", "stakeholder", "welfare", "tax", "export", "news",
           "energy", "community", "training"]

CONFIG = """\
[input]
tweets = "tweets.jsonl"
firms = "firms.csv"
wordlists = ["wordlist_it.txt", "wordlist_en.txt"]

[period]
start = "2020-03-01"
end = "2020-11-17"

[normalize]
relative_threshold = 0.2

[solver]
method = "fixed-point"
tolerance = 1e-10

[validation]
alpha = 0.05
mode = "auto"

[communities]
seed = 0
top_k_hashtags = 5

[correlations]
ateco_filters = ["62"]

[output]
dir = "out"
"""


def _stamp(ts: datetime) -> str:
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def _tweet(tid: int, acc: str, ts: datetime, tags: list[str], rng) -> dict:
    text = " ".join(["update"] + [f"#{t}" for t in tags])
    return {"tweet_id": str(tid), "account_id": acc, "timestamp": _stamp(ts), "text": text,
            "hashtags": tags, "is_retweet": bool(rng.random() < 0.2),
            "like_count": int(rng.poisson(4 + 3 * len(tags))), "retweet_count": int(rng.poisson(2)),
            "verified_account": acc.endswith("01")}


def generate(out_dir: str | Path, seed: int = 7, per_group: int = 16) -> Path:
    """Write the fixture files into ``out_dir`` and return the config path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    before0 = datetime(2020, 1, 5, tzinfo=timezone.utc)
    inside0 = datetime(2020, 3, 10, tzinfo=timezone.utc)
    lines: list[str] = []
    tid = 1000
    accounts: dict[str, str] = {}
    variants_by_group = {g: [v for v, gg in VARIANTS.items() if gg == g] for g in POOLS}

    for group, pool in POOLS.items():
        for k in range(1, per_group + 1):
            acc = f"{group}{k:02d}"
            accounts[acc] = group
            # each account favours a random subset of its pool
            own = list(rng.choice(pool, size=13, replace=False))
            for n in range(24):
                ts = (before0 if n < 3 else inside0) + timedelta(days=int(rng.integers(0, 50 if n < 3 else 240)),
                                                                 minutes=int(rng.integers(0, 1440)))
                tags = list(dict.fromkeys(str(t) for t in rng.choice(own, size=int(rng.integers(2, 5)))))
                if rng.random() < 0.15:
                    tags.append(str(rng.choice(SHARED)))
                if rng.random() < 0.04 and variants_by_group[group]:
                    tags.append(str(rng.choice(variants_by_group[group])))
                lines.append(json.dumps(_tweet(tid, acc, ts, tags, rng), ensure_ascii=False))
                tid += 1

    # active only inside the window: dropped by the period filter
    for k in range(1, 4):
        acc = f"nuovo{k:02d}"
        for n in range(4):
            ts = inside0 + timedelta(days=10 * n + k)
            lines.append(json.dumps(_tweet(tid, acc, ts, ["covid19", "energia"], rng), ensure_ascii=False))
            tid += 1
    # retained but never tag anything
    for k in range(1, 3):
        acc = f"silente{k:02d}"
        for ts in (before0 + timedelta(days=k), inside0 + timedelta(days=k)):
            lines.append(json.dumps(_tweet(tid, acc, ts, [], rng), ensure_ascii=False))
            tid += 1
    lines.append('{"tweet_id": "bad1", "account_id": "verde01"')
    lines.append('{"tweet_id": "bad2", "timestamp": "2020-05-01T00:00:00Z"}')

    order = rng.permutation(len(lines))
    (out / "tweets.jsonl").write_text("\n".join(lines[i] for i in order) + "\n", encoding="utf-8")

    with open(out / "firms.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "ateco_code", "guo_type", "total_assets", "revenues", "employees",
                    "followers", "friends"])
        for acc, group in accounts.items():
            size = rng.lognormal(5.0, 1.2)
            assets = size * rng.lognormal(2.0, 0.3)
            w.writerow([acc, str(rng.choice(ATECO[group])), str(rng.choice(GUO_TYPES)),
                        f"{assets:.1f}", f"{size * rng.lognormal(1.0, 0.4):.1f}",
                        int(size * rng.lognormal(0.0, 0.3)),
                        "" if rng.random() < 0.1 else int(size * 20 * rng.lognormal(0.0, 0.8)),
                        int(rng.lognormal(5.0, 1.0))])
        w.writerow(["silente01", "62", "family", "120.0", "80.0", 15, 300, 40])

    (out / "wordlist_it.txt").write_text("\n".join(ITALIAN) + "\n", encoding="utf-8")
    (out / "wordlist_en.txt").write_text("\n".join(ENGLISH) + "\n", encoding="utf-8")
    (out / "config.toml").write_text(CONFIG, encoding="utf-8")
    return out / "config.toml"


def bundled_config() -> Path:
    """Path of the fixture shipped inside the package."""
    return Path(str(resources.files("csrnet").joinpath("data/fixture/config.toml")))


if __name__ == "__main__":
    import sys
    print(generate(sys.argv[1] if len(sys.argv) > 1 else "fixture"))
