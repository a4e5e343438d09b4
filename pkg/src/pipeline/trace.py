"""
Edit trace: per-step control decisions, plus latents in debug mode.
"""

import io
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..core.files import write_json_atomic


@dataclass
class StepRecord:
    step: int
    timestep: int
    alpha: float
    alpha_next: float
    injected: bool
    rgb_cam: bool
    bb: bool
    recovered_z0_error: float  # max |recover_clean(z_src, ε̂) − z0_src|


@dataclass
class EditTrace:
    provenance: str
    fallback_reason: Optional[str] = None
    steps: list[StepRecord] = field(default_factory=list)
    latents: Optional[dict[str, list[np.ndarray]]] = None  # debug only

    @property
    def fallback(self) -> bool:
        return self.provenance == "fallback_none"

    def record_latents(self, **arrays: np.ndarray):
        if self.latents is None:
            return
        for name, array in arrays.items():
            self.latents.setdefault(name, []).append(np.array(array, copy=True))

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "fallback_reason": self.fallback_reason,
            "steps": [asdict(s) for s in self.steps],
        }

    def save(self, stem: Path) -> list[Path]:
        """Write <stem>_trace.json and, with latents, <stem>_trace.npz."""
        written = []
        json_path = stem.with_name(f"{stem.name}_trace.json")
        write_json_atomic(json_path, self.to_dict())
        written.append(json_path)

        if self.latents:
            npz_path = stem.with_name(f"{stem.name}_trace.npz")
            buf = io.BytesIO()
            np.savez_compressed(buf, **{name: np.stack(arrays) for name, arrays in self.latents.items()})
            tmp_file = npz_path.with_suffix(".npz.tmp")
            tmp_file.write_bytes(buf.getvalue())
            tmp_file.replace(npz_path)
            written.append(npz_path)
        return written
