"""
EntroFlux 命令行入口

用法:
    python -m cli.app check-hypotheses --system euler --config configs/euler_hypotheses.yaml --out out/report.json
    python -m cli.app probe-uniqueness --config configs/euler_probe.yaml --out out/probe/ --threads 4
"""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from config import config
from utils.errors import EntroFluxError, ValidationError

from .commands import COMMANDS, EXIT_ERROR, dispatch
from .runconfig import parse_config

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="entroflux",
        description="Measure-valued/strong uniqueness numerics for hyperbolic systems.",
    )
    ap.add_argument("command", choices=tuple(COMMANDS), help="Experiment to run.")
    ap.add_argument("--system", default=None, help="System id (overrides system.name in the config).")
    ap.add_argument("--config", type=Path, default=None, help="YAML run configuration.")
    ap.add_argument("--out", type=Path, default=None, help="Output directory, or a .json report path.")
    ap.add_argument("--seed", type=int, default=None, help="Random seed (overrides the config).")
    ap.add_argument("--threads", type=int, default=None, help="Cap on worker threads.")
    ap.add_argument("--strict-vacuum", action="store_true", help="Raise on vacuum instead of clamping.")
    ap.add_argument("--log-level", default=config.LOG_LEVEL, help="Logging level (default from ENTROFLUX_LOG_LEVEL).")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    seed = args.seed
    if seed is None and args.config is None:
        seed = config.DEFAULT_SEED
    try:
        cfg = parse_config(args.config, seed_override=seed, system_override=args.system)
    except ValidationError as exc:
        print("Invalid configuration:")
        for line in exc.errors:
            print(f"  - {line}")
        return EXIT_ERROR
    except EntroFluxError as exc:
        print(f"Error ({type(exc).__name__}): {exc}")
        return EXIT_ERROR
    except Exception as exc:
        logger.exception("configuration loading crashed")
        print(f"Error ({type(exc).__name__}): {exc}")
        return EXIT_ERROR

    return dispatch(
        args.command,
        cfg,
        out=args.out,
        threads=args.threads,
        strict_vacuum=True if args.strict_vacuum else None,
    )


if __name__ == "__main__":
    raise SystemExit(main())
