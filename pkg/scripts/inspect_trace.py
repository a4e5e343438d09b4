#!/usr/bin/env python3
"""
Print a saved edit trace (from `ale.py edit --debug`).

Usage:
    python scripts/inspect_trace.py ale-out/cats_edited_trace.json
"""

import json
import sys

import numpy as np

from _helpers import resolve_path

from src.core.formatting import format_table


def main() -> int:
    if len(sys.argv) < 2:
        print("Usage: python scripts/inspect_trace.py <stem>_trace.json")
        return 1

    path = resolve_path(sys.argv[1])
    if not path.exists():
        print(f"Error: {path} does not exist")
        return 1

    with open(path, encoding="utf-8") as f:
        trace = json.load(f)

    print(f"Trace: {path}")
    print(f"Provenance: {trace['provenance']}")
    if trace.get("fallback_reason"):
        print(f"Fallback: {trace['fallback_reason']}")
    print()

    rows = [
        [str(s["step"]), str(s["timestep"]), f"{s['alpha']:.4f}", f"{s['alpha_next']:.4f}",
         "yes" if s["injected"] else "-", "yes" if s["rgb_cam"] else "-", "yes" if s["bb"] else "-",
         f"{s['recovered_z0_error']:.2e}"]
        for s in trace["steps"]
    ]
    print(format_table(["Step", "t", "alpha", "alpha next", "Q/K", "RGB-CAM", "BB", "z0 err"], rows))

    npz_path = path.with_name(path.name.replace("_trace.json", "_trace.npz"))
    if npz_path.exists():
        latents = np.load(npz_path)
        print()
        for name in latents.files:
            arr = latents[name]
            print(f"{name}: {arr.shape}, |max| {np.abs(arr).max():.4f}")
        if "z_src" in latents.files and "z_tgt" in latents.files:
            drift = np.abs(latents["z_tgt"] - latents["z_src"]).reshape(len(latents["z_src"]), -1).max(axis=1)
            print("max |z_tgt - z_src| per step: " + " ".join(f"{d:.3f}" for d in drift))
    return 0


if __name__ == "__main__":
    sys.exit(main())
