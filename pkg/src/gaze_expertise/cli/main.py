# File: src/gaze_expertise/cli/main.py

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List

from ..core.errors import ConfigurationError, GazeExpertiseError, ParameterError
from ..core.logs import configure_logging
from . import commands  # noqa: F401  (registers the subcommands)
from .config import load_run_config
from .registry import COMMANDS
from .store import write_run_record

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML run configuration.")
    common.add_argument("--seed", type=int, help="Base seed (splits, initialization, synthesis).")
    common.add_argument(
        "--window-size", dest="window_sizes", type=float, action="append",
        help="Window size in seconds; repeat for several.",
    )
    common.add_argument("--initial-phase-only", action="store_true", help="Keep only initial-decision windows.")
    common.add_argument("--n-models", type=int, help="Models per batch.")
    common.add_argument("--out", type=Path, help="Output directory.")
    common.add_argument("--plots", action="store_true", help="Also write PNG line plots.")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaze-expertise",
        description="Eye-tracking based expertise assessment: features, statistics and classifiers.",
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)
    for name, cmd in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=cmd.description, description=cmd.description)
        if cmd.arguments is not None:
            cmd.arguments(p)
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.window_sizes:
        overrides["window_sizes"] = args.window_sizes
    if args.initial_phase_only:
        overrides["phase_filter"] = "initial_only"
    if args.n_models is not None:
        overrides["n_models"] = args.n_models
    if args.out is not None:
        overrides["paths"] = {"out": str(args.out)}
    if args.plots:
        overrides["plots"] = True
    if args.log_level is not None:
        overrides["log_level"] = args.log_level
    return overrides


def _report_error(e: GazeExpertiseError) -> int:
    print(json.dumps(e.to_dict()), file=sys.stderr)
    return EXIT_USAGE if isinstance(e, (ConfigurationError, ParameterError)) else EXIT_FAILURE


def main(argv: List[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    started = datetime.now(timezone.utc)
    try:
        config = load_run_config(args.config, overrides_from_args(args))
    except GazeExpertiseError as e:
        return _report_error(e)

    out = config.paths.out
    configure_logging(config.log_level, out / "run.log")
    cmd = COMMANDS[args.command]
    logger.info("-> gaze-expertise %s (out: %s)", cmd.name, out)
    try:
        result = cmd.run(config, args)
    except GazeExpertiseError as e:
        logger.error("🔥 %s failed: %s", cmd.name, e)
        return _report_error(e)
    write_run_record(out, config, cmd.name, argv, started)
    logger.info("✅ %s done: %s", cmd.name, json.dumps(result, default=str))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
