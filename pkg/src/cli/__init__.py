"""
Command-line entry points.
"""

from .main import build_parser, main
from .edit import cmd_edit, parse_pairs, build_sidecar
from .bench import cmd_bench, cmd_generate, cmd_run, cmd_report, variant_name

__all__ = [
    "build_parser",
    "main",
    "cmd_edit",
    "parse_pairs",
    "build_sidecar",
    "cmd_bench",
    "cmd_generate",
    "cmd_run",
    "cmd_report",
    "variant_name",
]
