"""
Attribute-leakage scores.

TELS: how strongly the background matches each target prompt.
TILS: how strongly each target object's region matches the other objects'
target prompts. Regions are selected by zero-masking, not cropping.
"""

from typing import Optional, Sequence

import numpy as np

from ..backends.base import Scorer
from ..core.errors import EmptyBackground, ShapeError
from ..masks.masks import MaskSet


def region_mask(image: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Image with exact zeros outside mask."""
    mask = np.asarray(mask).astype(bool)
    if mask.shape != image.shape[:2]:
        raise ShapeError(f"Mask {mask.shape} does not match image {image.shape[:2]}")
    return np.where(mask[..., None], image, 0.0)


def _regions(image: np.ndarray, mask_set: MaskSet) -> tuple[list[np.ndarray], np.ndarray]:
    return mask_set.at(image.shape[:2])


def tels(image: np.ndarray, mask_set: MaskSet, target_prompts: Sequence[str], scorer: Scorer) -> float:
    """Mean over objects of scorer(image ⊙ background, target prompt)."""
    if not target_prompts:
        raise ValueError("TELS needs at least one target prompt")
    _, background = _regions(image, mask_set)
    if not np.any(background):
        raise EmptyBackground("Background mask is empty; TELS is undefined")
    masked = region_mask(image, background)
    return float(np.mean([scorer.score(masked, prompt) for prompt in target_prompts]))


def tils(
    image: np.ndarray, mask_set: MaskSet, target_prompts: Sequence[str], scorer: Scorer,
) -> Optional[float]:
    """
    Mean over ordered pairs i != j of scorer(image ⊙ m_j, target prompt i).

    None for a single object.
    """
    k = len(target_prompts)
    if k < 2:
        return None
    objects, _ = _regions(image, mask_set)
    if len(objects) != k:
        raise ShapeError(f"{len(objects)} object masks for {k} target prompts")

    masked = [region_mask(image, m) for m in objects]
    total = 0.0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            total += scorer.score(masked[j], target_prompts[i])
    return total / (k * (k - 1))


def editing_performance(image: np.ndarray, joined_target_prompt: str, scorer: Scorer) -> float:
    """Full-image similarity to the joined target prompt."""
    return float(scorer.score(image, joined_target_prompt))
