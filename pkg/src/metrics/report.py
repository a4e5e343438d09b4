"""
Per-scenario leakage reports.
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Optional, Sequence

import numpy as np

from ..backends.base import Scorer
from ..core.errors import EmptyBackground
from ..pipeline.edit import EditResult
from .background import background_preservation
from .leakage import editing_performance, tels, tils

# (edited, source) -> score
ImageMetric = Callable[[np.ndarray, np.ndarray], float]


@dataclass
class MetricAdapters:
    """Optional external metrics; a missing adapter leaves its field out of the report."""
    lpips: Optional[ImageMetric] = None
    structure_distance: Optional[ImageMetric] = None


@dataclass
class LeakageReport:
    scenario_id: str
    image_id: str
    edit_type: str
    num_objects: int
    seed: int
    tels: Optional[float]
    tils: Optional[float]  # None for a single object
    editing_performance: float
    psnr: Optional[float] = None
    ssim: Optional[float] = None
    mse: Optional[float] = None
    lpips: Optional[float] = None
    structure_distance: Optional[float] = None
    instance: int = 0
    variant: str = "ale"
    eos_strategy: str = "ore"
    provenance: str = "file"
    runtime_sec: float = 0.0
    config_hash: str = ""
    version: str = ""
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("lpips", "structure_distance"):
            if data[key] is None:
                del data[key]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "LeakageReport":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def metric(self, name: str) -> Optional[float]:
        return getattr(self, name, None)


def build_report(
    result: EditResult,
    target_prompts: Sequence[str],
    joined_target_prompt: str,
    scorer: Scorer,
    metadata: dict,
    adapters: Optional[MetricAdapters] = None,
) -> LeakageReport:
    """
    Score one edit.

    Args:
        result: Finished edit (must carry a mask set)
        target_prompts: Per-object target prompts, in object order
        joined_target_prompt: Base target prompt for editing performance
        scorer: Image-text similarity on the 0-100 scale
        metadata: scenario_id, image_id, edit_type, seed and optional
            instance/variant/config_hash/version
        adapters: Optional LPIPS / structure-distance callables
    """
    if result.mask_set is None:
        raise ValueError("Cannot score leakage without masks")

    edited = result.edited_image
    notes = []
    background_scores = (None, None, None)
    try:
        tels_score = tels(edited, result.mask_set, target_prompts, scorer)
        _, background = result.mask_set.at(edited.shape[:2])
        background_scores = background_preservation(edited, result.source_image, background)
    except EmptyBackground:
        tels_score = None
        notes.append("empty_background")
    psnr_score, ssim_score, mse_score = background_scores

    adapters = adapters or MetricAdapters()
    lpips_score = None
    structure_score = None
    if adapters.lpips is not None:
        lpips_score = float(adapters.lpips(edited, result.source_image))
    if adapters.structure_distance is not None:
        structure_score = float(adapters.structure_distance(edited, result.source_image))

    return LeakageReport(
        scenario_id=metadata["scenario_id"],
        image_id=metadata["image_id"],
        edit_type=metadata["edit_type"],
        num_objects=len(target_prompts),
        seed=metadata["seed"],
        tels=tels_score,
        tils=tils(edited, result.mask_set, target_prompts, scorer),
        editing_performance=editing_performance(edited, joined_target_prompt, scorer),
        psnr=psnr_score,
        ssim=ssim_score,
        mse=mse_score,
        lpips=lpips_score,
        structure_distance=structure_score,
        instance=metadata.get("instance", 0),
        variant=metadata.get("variant", "ale"),
        eos_strategy=result.ore.eos_strategy,
        provenance=result.provenance,
        runtime_sec=round(result.runtime_sec, 4),
        config_hash=metadata.get("config_hash", ""),
        version=metadata.get("version", ""),
        notes=notes,
    )
