#!/usr/bin/env python3
"""
ALE Edit - multi-object image editing without attribute leakage.

Runs single edits and the ALE-Bench benchmark (scenario generation, runs
and reports). Console output is also written to .ale/logs/.
"""

import sys

from src.cli import main
from src.core.logging import start_session_log, stop_session_log


def run() -> int:
    tee = start_session_log()
    try:
        return main()
    finally:
        stop_session_log(tee)


if __name__ == "__main__":
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        print("\nInterrupted.")
        sys.exit(130)
