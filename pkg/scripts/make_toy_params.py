#!/usr/bin/env python3
"""
Write the golden toy-backend parameter file.

Usage:
    python scripts/make_toy_params.py            # assets/toy_params_v1.bin
    python scripts/make_toy_params.py --check    # verify the file matches a fresh generation
"""

import argparse
import sys

import numpy as np

from _helpers import resolve_path

from src.backends.toy import ToyParams
from src.config import ToyBackendConfig
from src.core.paths import get_toy_params_path


def main() -> int:
    parser = argparse.ArgumentParser(description="Generate the golden toy parameter file")
    parser.add_argument("--out", help="Output path (default: assets/toy_params_v1.bin)")
    parser.add_argument("--seed", type=int, default=0, help="Parameter seed")
    parser.add_argument("--check", action="store_true", help="Compare the existing file instead of writing")
    args = parser.parse_args()

    path = resolve_path(args.out) if args.out else get_toy_params_path()
    params = ToyParams.generate(ToyBackendConfig(seed=args.seed))

    if args.check:
        if not path.exists():
            print(f"Error: {path} does not exist")
            return 1
        stored = ToyParams.load(path)
        mismatched = [
            name for name, arr in params.arrays.items()
            if name not in stored.arrays or not np.array_equal(arr, stored.arrays[name])
        ]
        if stored.config != params.config or mismatched:
            print(f"Error: {path} differs from a fresh generation ({', '.join(mismatched) or 'config'})")
            return 1
        print(f"{path} matches ({len(params.arrays)} arrays)")
        return 0

    params.save(path)
    total = sum(arr.size for arr in params.arrays.values())
    print(f"Wrote {path} ({len(params.arrays)} arrays, {total} values)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
