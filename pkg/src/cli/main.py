"""
Argument parsing and dispatch for the `ale` command.
"""

import argparse
from typing import Optional, Sequence

from .. import __version__
from . import bench, edit


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ale",
        description="ALE Edit - multi-object image editing without attribute leakage",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python ale.py edit --image cats.png --pair "a cat->a tiger" --pair "a dog->a wolf" --masks masks/
  python ale.py bench generate --manifest bench/manifest.json --out scenarios.json
  python ale.py bench run --scenarios scenarios.json --workers 4
  python ale.py bench report ale-out/bench --by variant
""",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    edit.add_parser(subparsers)
    bench.add_parser(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv and run the chosen command; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.handler(args)
