"""Command-line entry point: ``csrnet <stage> --config run.toml``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .bicm import METHODS
from .config import load_config
from .errors import CsrnetError
from .fixture import bundled_config
from .pipeline import STAGES, Pipeline

log = logging.getLogger("csrnet")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csrnet", description=__doc__)
    ap.add_argument("stage", choices=(*STAGES, "all"), help="stage to run; 'all' runs every stage in order")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="TOML run configuration")
    src.add_argument("--fixture", action="store_true", help="use the small bundled corpus")
    ap.add_argument("--out", type=Path, help="output directory (overrides the config)")
    ap.add_argument("--seed", type=int, help="community detection seed")
    ap.add_argument("--alpha", type=float, help="FDR level")
    ap.add_argument("--mode", choices=("auto", "exact", "poisson"), help="p-value computation")
    ap.add_argument("--method", choices=METHODS, help="BiCM solver")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(bundled_config() if args.fixture else args.config)
        if args.fixture and args.out is None:
            args.out = Path("csrnet-fixture-out")
        solver = cfg.solver
        if args.method:
            solver = replace(solver, method=args.method)
        cfg = cfg.with_overrides(out_dir=args.out, seed=args.seed, alpha=args.alpha,
                                 mode=args.mode, solver=solver)
        produced = Pipeline(cfg).run(args.stage)
    except CsrnetError as exc:
        print(f"csrnet: error: {exc}", file=sys.stderr)
        return exc.exit_code
    for name in sorted(produced):
        print(produced[name])
    return 0


if __name__ == "__main__":
    sys.exit(main())
