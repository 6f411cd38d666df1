import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

from src.errors import ConfigError, SamplingError
from src.harness.figures import FIGURE_IDS
from src.loader import load_commands
from src.middleware.logger import configure_logging, logger_middleware
from src.router import CommandRouter

load_dotenv()
LOG_LEVEL = os.getenv("DIGING_LOG_LEVEL", "INFO")

logger = logging.getLogger("experiment")

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _add_overrides(parser: argparse.ArgumentParser, data_help: str) -> None:
    parser.add_argument("--trials", type=int)
    parser.add_argument("--iterations", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--output")
    parser.add_argument("--graph", choices=["barbell", "lollipop", "complete"])
    parser.add_argument("--period", type=int)
    parser.add_argument("--data", help=data_help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="experiment", description="DIGing-SGLD experiment runner")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run an experiment config")
    run.add_argument("--config", required=True)
    _add_overrides(run, "synthetic or csv:<path>")

    reproduce = commands.add_parser("reproduce", help="reproduce a pinned figure")
    reproduce.add_argument("figure", choices=FIGURE_IDS)
    _add_overrides(reproduce, "path to the real-data CSV")

    tune = commands.add_parser("tune", help="grid-search the stepsize")
    tune.add_argument("--config", required=True)
    tune.add_argument("--grid", required=True, help="comma-separated stepsizes, e.g. 0.001,0.5/L")
    tune.add_argument("--tune-trials", type=int, dest="tune_trials")
    _add_overrides(tune, "synthetic or csv:<path>")

    theory = commands.add_parser("theory-report", help="evaluate the bound constants")
    theory.add_argument("--config", required=True)
    theory.add_argument("--epsilon", type=float)
    theory.add_argument("--warmup-trials", type=int, dest="warmup_trials")
    theory.add_argument("--statement-constant", action="store_true", dest="statement_constant")
    _add_overrides(theory, "synthetic or csv:<path>")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging(LOG_LEVEL)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        router = CommandRouter()
        load_commands(router)
        handler, _ = router.get_handler(args.command)
        if handler is None:
            logger.error("No handler registered for command '%s'", args.command)
            return USAGE_ERROR
        return logger_middleware(handler)(args)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return USAGE_ERROR
    except SamplingError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
