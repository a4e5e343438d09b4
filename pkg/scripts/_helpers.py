"""Shared helpers for maintenance scripts."""

import sys
from pathlib import Path

# Add repo root to path for src imports
REPO_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(REPO_ROOT))


def resolve_path(arg: str) -> Path:
    """Path argument relative to the current directory, then to the repo root."""
    path = Path(arg)
    if path.exists() or path.is_absolute():
        return path
    return REPO_ROOT / path
