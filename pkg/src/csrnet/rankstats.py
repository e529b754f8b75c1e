"""Spearman correlations between online activity and firm financials."""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata
from scipy.stats import t as student_t

from .errors import InsufficientData, InvalidInput

GUO_TYPES = ("state/public", "funds", "family", "company", "other")
ONLINE_VARIABLES = ("followers", "friends", "messages", "likes_per_message",
                    "retweets_per_message", "hashtag_count")
FINANCIAL_VARIABLES = ("total_assets", "revenues", "employees")
DEFAULT_VARIABLES = ONLINE_VARIABLES + FINANCIAL_VARIABLES

# below this sample size the p-value comes from full permutation enumeration
EXACT_BELOW = 10


def _num(v) -> float:
    if v is None or v == "":
        return math.nan
    return float(v)


@dataclass
class FirmRecord:
    account_id: str
    ateco_code: str | None = None
    guo_type: str | None = None
    total_assets: float = math.nan
    revenues: float = math.nan
    employees: float = math.nan
    followers: float = math.nan
    friends: float = math.nan
    messages: float = math.nan
    likes_per_message: float = math.nan
    retweets_per_message: float = math.nan
    hashtag_count: float = math.nan

    def __post_init__(self):
        if self.ateco_code not in (None, ""):
            code = str(self.ateco_code).strip()
            code = code.split(".")[0].zfill(2)[:2] if code.replace(".", "").isdigit() else code
            if not (code.isdigit() and 1 <= int(code) <= 99):
                raise InvalidInput(f"ATECO code {self.ateco_code!r} outside 01-99")
            self.ateco_code = code
        else:
            self.ateco_code = None
        self.guo_type = self.guo_type or None
        for name in DEFAULT_VARIABLES:
            value = _num(getattr(self, name))
            if value < 0:
                raise InvalidInput(f"{name} must be non-negative for {self.account_id!r}")
            setattr(self, name, value)

    @classmethod
    def from_row(cls, row: dict) -> "FirmRecord":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in row.items() if k in known})


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    variables: tuple[str, ...]
    rho: np.ndarray
    p_values: np.ndarray
    n_effective: np.ndarray

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["variable", *self.variables])
            for name, row in zip(self.variables, self.rho):
                w.writerow([name, *(f"{v:.6f}" for v in row)])

    def to_long_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["var1", "var2", "rho", "p", "n"])
            k = len(self.variables)
            for a in range(k):
                for b in range(a + 1, k):
                    w.writerow([self.variables[a], self.variables[b], f"{self.rho[a, b]:.6f}",
                                f"{self.p_values[a, b]:.6g}", int(self.n_effective[a, b])])


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    if den == 0:
        return math.nan
    return float(np.clip((a @ b) / den, -1.0, 1.0))


@lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8)


def _exact_pvalue(rx: np.ndarray, ry: np.ndarray, rho: float) -> float:
    perms = _permutations(len(ry))
    ys = ry[perms]
    xc = rx - rx.mean()
    yc = ys - ys.mean(axis=1, keepdims=True)
    r = (yc @ xc) / np.sqrt((xc @ xc) * (yc * yc).sum(axis=1))
    return float(np.mean(np.abs(r) >= abs(rho) - 1e-12))


def spearman(x: Sequence[float], y: Sequence[float], exact: bool | None = None) -> tuple[float, float]:
    """Rank correlation with average ranks for ties and a two-sided p-value.

    Pairs with a missing (non-finite) value on either side are dropped. The
    p-value uses the t approximation on ``n - 2`` degrees of freedom, or full
    permutation enumeration for small samples (``exact``; default below 10).
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InvalidInput("x and y differ in length")
    keep = np.isfinite(x) & np.isfinite(y)
    n = int(keep.sum())
    if n < 3:
        raise InsufficientData(f"{n} complete pairs; need at least 3")
    rx, ry = rankdata(x[keep]), rankdata(y[keep])
    rho = _pearson(rx, ry)
    if math.isnan(rho):
        return rho, math.nan
    if exact if exact is not None else n < EXACT_BELOW:
        return rho, _exact_pvalue(rx, ry, rho)
    if abs(rho) >= 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return rho, float(2.0 * student_t.sf(abs(t), n - 2))


def correlation_matrix(records: Iterable[FirmRecord], variables: Sequence[str] = DEFAULT_VARIABLES,
                       ateco_filter: str | int | None = None) -> CorrelationMatrix:
    """Pairwise-complete Spearman matrix, optionally for one ATECO sector."""
    records = list(records)
    if ateco_filter is not None:
        code = str(ateco_filter).zfill(2)
        records = [r for r in records if r.ateco_code == code]
    if len(records) < 3:
        raise InsufficientData(f"{len(records)} records after filtering; need at least 3")
    cols = np.array([[getattr(r, v) for v in variables] for r in records], dtype=float)
    k = len(variables)
    rho = np.full((k, k), np.nan)
    pv = np.full((k, k), np.nan)
    n_eff = np.zeros((k, k), dtype=np.int64)
    for a in range(k):
        n_eff[a, a] = int(np.isfinite(cols[:, a]).sum())
        rho[a, a], pv[a, a] = 1.0, 0.0
        for b in range(a + 1, k):
            both = np.isfinite(cols[:, a]) & np.isfinite(cols[:, b])
            n_eff[a, b] = n_eff[b, a] = int(both.sum())
            try:
                r, p = spearman(cols[:, a], cols[:, b])
            except InsufficientData:
                continue
            rho[a, b] = rho[b, a] = r
            pv[a, b] = pv[b, a] = p
    return CorrelationMatrix(tuple(variables), rho, pv, n_eff)
