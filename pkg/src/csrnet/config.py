"""Pipeline configuration loaded from a TOML file."""
from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, replace
from datetime import date
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .bicm import SolverConfig
from .errors import ConfigError
from .ingest import PeriodFilter


@dataclass(frozen=True)
class PipelineConfig:
    tweets: Path
    firms: Path | None = None
    lexicon: Path | None = None
    wordlists: tuple[Path, ...] = ()
    period: PeriodFilter = field(default_factory=PeriodFilter)
    relative_threshold: float = 0.20
    enable_digit_strip: bool = True
    include_hashtagless_accounts: bool = True
    solver: SolverConfig = field(default_factory=SolverConfig)
    alpha: float = 0.05
    mode: str = "auto"
    hypothesis_count: int | None = None
    seed: int = 0
    ateco_filters: tuple[str, ...] = ()
    top_k_hashtags: int = 5
    out_dir: Path = Path("out")

    def check_inputs(self) -> None:
        for p in (self.tweets, self.firms, self.lexicon, *self.wordlists):
            if p is not None and not Path(p).is_file():
                raise ConfigError(f"input file {p} does not exist")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.mode not in ("auto", "exact", "poisson"):
            raise ConfigError(f"unknown validation mode {self.mode!r}")

    def with_overrides(self, **kw) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def echo(self) -> dict:
        """JSON-friendly view, paths relative to nothing (as given)."""
        def conv(v):
            if isinstance(v, Path):
                return v.as_posix()
            if isinstance(v, date):
                return v.isoformat()
            if isinstance(v, (tuple, list)):
                return [conv(x) for x in v]
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            return v
        d = asdict(self)
        d.pop("out_dir")
        return conv(d)


def _date(v) -> date:
    if isinstance(v, date):
        return v
    try:
        return date.fromisoformat(str(v))
    except ValueError as exc:
        raise ConfigError(f"bad date {v!r}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    base = path.parent

    def rel(p):
        if p in (None, ""):
            return None
        p = Path(p)
        return p if p.is_absolute() else base / p

    inp = doc.get("input", {})
    if "tweets" not in inp:
        raise ConfigError("[input] tweets is required")
    period = doc.get("period", {})
    norm = doc.get("normalize", {})
    solver = doc.get("solver", {})
    val = doc.get("validation", {})
    try:
        return PipelineConfig(
            tweets=rel(inp["tweets"]),
            firms=rel(inp.get("firms")),
            lexicon=rel(inp.get("lexicon")),
            wordlists=tuple(rel(w) for w in inp.get("wordlists", [])),
            period=PeriodFilter(
                start=_date(period.get("start", "2020-03-01")),
                end=_date(period.get("end", "2020-11-17")),
                require_straddle=bool(period.get("require_straddle", True)),
            ),
            relative_threshold=float(norm.get("relative_threshold", 0.20)),
            enable_digit_strip=bool(norm.get("enable_digit_strip", True)),
            include_hashtagless_accounts=bool(
                doc.get("network", {}).get("include_hashtagless_accounts", True)),
            solver=SolverConfig(**solver),
            alpha=float(val.get("alpha", 0.05)),
            mode=str(val.get("mode", "auto")),
            hypothesis_count=val.get("hypothesis_count"),
            seed=int(doc.get("communities", {}).get("seed", 0)),
            ateco_filters=tuple(str(a) for a in doc.get("correlations", {}).get("ateco_filters", [])),
            top_k_hashtags=int(doc.get("communities", {}).get("top_k_hashtags", 5)),
            out_dir=rel(doc.get("output", {}).get("dir", "out")),
        )
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
