"""
Mask set construction: overlap resolution, dilation, background and pyramid.

Order of operations for a set of raw object masks at image resolution:
disjointify -> dilate each object -> disjointify again -> background is the
complement of the union -> per-resolution pyramid. At every resolution the
object masks and the background partition the pixels.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from PIL import Image
from scipy.ndimage import binary_dilation

from ..core.constants import MASK_THRESHOLD, MAX_DILATION_RATIO
from ..core.errors import MaskShapeError, RangeError, ShapeError

PROVENANCES = ("file", "segmenter", "fallback_none")

Resolution = tuple[int, int]


@dataclass
class FallbackSignal:
    """Segmentation failed: run without RGB-CAM masking and background blending."""
    reason: str
    failed_objects: list[int] = field(default_factory=list)  # 1-based indices
    provenance: str = "fallback_none"


@dataclass
class MaskSet:
    """
    Per-object masks, background and per-resolution pyramid.

    pyramid maps (h, w) -> K object masks followed by the background mask.
    """
    object_masks: list[np.ndarray]
    background: np.ndarray
    pyramid: dict[Resolution, list[np.ndarray]]
    dilation_radius_px: int
    provenance: str
    confidences: Optional[list[float]] = None

    @property
    def num_objects(self) -> int:
        return len(self.object_masks)

    @property
    def resolution(self) -> Resolution:
        return self.background.shape

    def at(self, resolution: Resolution) -> tuple[list[np.ndarray], np.ndarray]:
        """(object masks, background) at a resolution."""
        resolution = tuple(resolution)
        if resolution == self.resolution:
            return self.object_masks, self.background
        if resolution not in self.pyramid:
            raise ShapeError(f"No masks at resolution {resolution}; have {sorted(self.pyramid)}")
        level = self.pyramid[resolution]
        return level[:-1], level[-1]


def _as_bool(mask) -> np.ndarray:
    return np.asarray(mask) > 0


def check_same_shape(masks: Sequence[np.ndarray], shape: Optional[Resolution] = None):
    """Raise MaskShapeError unless all masks share one 2-D shape (and match shape if given)."""
    expected = tuple(shape) if shape is not None else None
    for i, mask in enumerate(masks, start=1):
        mask_shape = np.shape(mask)
        if len(mask_shape) != 2:
            raise MaskShapeError(f"Mask {i} must be 2-D, got shape {mask_shape}")
        if expected is None:
            expected = mask_shape
        elif mask_shape != expected:
            raise MaskShapeError(f"Mask {i} has shape {mask_shape}, expected {expected}")


def disjointify(
    masks: Sequence[np.ndarray],
    confidences: Optional[Sequence[float]] = None,
) -> list[np.ndarray]:
    """
    Resolve overlaps so each pixel belongs to at most one object.

    A contested pixel goes to the object with higher confidence; ties (and
    masks without confidences) go to the lower object index. The union of the
    masks is unchanged.
    """
    bool_masks = [_as_bool(m) for m in masks]
    if not bool_masks:
        return []
    conf = list(confidences) if confidences is not None else [0.0] * len(bool_masks)
    order = sorted(range(len(bool_masks)), key=lambda i: (-conf[i], i))

    claimed = np.zeros_like(bool_masks[0])
    result: list[Optional[np.ndarray]] = [None] * len(bool_masks)
    for i in order:
        result[i] = bool_masks[i] & ~claimed
        claimed |= result[i]
    return result


def dilation_radius(ratio: float, shape: Resolution) -> int:
    """Radius in pixels for a ratio of the shorter image side (floored)."""
    if not 0.0 <= ratio <= MAX_DILATION_RATIO:
        raise RangeError(f"dilation ratio must be in [0, {MAX_DILATION_RATIO}], got {ratio}")
    # round first so 0.07 * 100 does not floor to 6
    return int(math.floor(round(ratio * min(shape), 9)))


def dilate_by_radius(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary dilation with a (2r+1)×(2r+1) square; pixels beyond the border are background."""
    mask = _as_bool(mask)
    if radius <= 0:
        return mask.copy()
    structure = np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)
    return binary_dilation(mask, structure=structure)


def dilate_mask(mask: np.ndarray, ratio: float) -> np.ndarray:
    """Dilate by a square of radius floor(ratio · min(H, W)); ratio 0 is identity."""
    return dilate_by_radius(mask, dilation_radius(ratio, np.shape(mask)))


def build_background_mask(object_masks: Sequence[np.ndarray]) -> np.ndarray:
    """Complement of the union of the object masks."""
    if not object_masks:
        raise MaskShapeError("At least one object mask is required")
    check_same_shape(object_masks)
    return ~np.logical_or.reduce([_as_bool(m) for m in object_masks])


def downsample_mask(mask: np.ndarray, resolution: Resolution) -> np.ndarray:
    """Area-average a mask to (h, w) and threshold at MASK_THRESHOLD."""
    mask = _as_bool(mask)
    h, w = resolution
    H, W = mask.shape
    if (h, w) == (H, W):
        return mask.copy()
    if H % h == 0 and W % w == 0:
        coverage = mask.reshape(h, H // h, w, W // w).mean(axis=(1, 3))
    else:
        img = Image.fromarray(mask.astype(np.float32))
        coverage = np.asarray(img.resize((w, h), resample=Image.Resampling.BOX))
    return coverage >= MASK_THRESHOLD


def downsample_pyramid(
    object_masks: Sequence[np.ndarray],
    resolutions: Sequence[Resolution],
    confidences: Optional[Sequence[float]] = None,
) -> dict[Resolution, list[np.ndarray]]:
    """
    Per-resolution object masks plus background.

    Each object mask is area-averaged and thresholded, overlaps are resolved
    again with the same rule, and the background is recomputed as the
    complement, so every level is a partition.
    """
    pyramid = {}
    for resolution in resolutions:
        resolution = (int(resolution[0]), int(resolution[1]))
        objects = disjointify([downsample_mask(m, resolution) for m in object_masks], confidences)
        pyramid[resolution] = objects + [build_background_mask(objects)]
    return pyramid


def build_mask_set(
    object_masks: Sequence[np.ndarray],
    dilation_ratio: float,
    resolutions: Sequence[Resolution],
    provenance: str,
    confidences: Optional[Sequence[float]] = None,
    image_shape: Optional[Resolution] = None,
) -> MaskSet:
    """Run the full mask pipeline on raw object masks at image resolution."""
    if not object_masks:
        raise MaskShapeError("At least one object mask is required")
    check_same_shape(object_masks, image_shape)

    objects = disjointify(object_masks, confidences)
    radius = dilation_radius(dilation_ratio, objects[0].shape)
    objects = disjointify([dilate_by_radius(m, radius) for m in objects], confidences)
    background = build_background_mask(objects)

    return MaskSet(
        object_masks=objects,
        background=background,
        pyramid=downsample_pyramid(objects, resolutions, confidences),
        dilation_radius_px=radius,
        provenance=provenance,
        confidences=list(confidences) if confidences is not None else None,
    )
