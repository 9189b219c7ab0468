import sys
import logging
import argparse
import importlib

from config import SEED
from utils import setup_logging, handle_error

logger = logging.getLogger(__name__)

# Subcommand modules; each one registers its parsers in setup()
COMMANDS = [
    "commands.algebra",
    "commands.solve",
    "commands.games",
]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="intertype",
        description="Intersection type subtyping, unification and tiling-game reductions",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--seed", type=int, default=SEED, help="seed for fuzzing and random Spoilers")
    parser.add_argument("--jobs", type=int, default=1, help="parallel independent instances")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        importlib.import_module(name).setup(subparsers)
    return parser


def run(argv=None):
    """Exit status: 0 yes/success, 1 negative answer, 2 error."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level.upper() if args.log_level else None)
    try:
        return args.handler(args)
    except Exception as e:
        return handle_error(e)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
