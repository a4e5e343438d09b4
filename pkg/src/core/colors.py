"""
Shared color definitions for terminal output.
"""

import os
import sys


def _colors_enabled() -> bool:
    if os.environ.get("NO_COLOR"):
        return False
    stream = sys.__stdout__
    return bool(stream and stream.isatty())


class Colors:
    RESET = "\x1b[0m"
    BOLD = "\x1b[1m"
    RED = "\x1b[38;2;239;68;68m"
    GREEN = "\x1b[38;2;34;197;94m"
    YELLOW = "\x1b[38;2;234;179;8m"


if not _colors_enabled():
    for _name in [n for n in vars(Colors) if n.isupper()]:
        setattr(Colors, _name, "")
