"""
Mask providers and mask acquisition.

A provider turns (image, phrases) into raw per-object masks. File providers
read PNGs; the segmenter provider asks a service. acquire_masks runs the mask
pipeline on the result, or hands back a FallbackSignal when segmentation
failed for any object.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence, Union

import numpy as np

from ..core.errors import MaskShapeError, RequestError
from ..core.files import load_mask_png
from .masks import FallbackSignal, MaskSet, Resolution, build_mask_set
from .segmenter import HttpSegmenterClient


@dataclass
class RawMasks:
    """Masks straight from a provider, before overlap resolution and dilation."""
    masks: list[np.ndarray]
    provenance: str
    confidences: Optional[list[float]] = None


class MaskProvider(Protocol):
    def fetch(self, image: np.ndarray, phrases: Sequence[str]) -> Union[RawMasks, FallbackSignal]:
        ...


def mask_filename(scenario_id: str, index: int) -> str:
    """<scenario_id>_obj<i>.png with 1-based object index."""
    return f"{scenario_id}_obj{index}.png"


class FileMaskProvider:
    """One PNG mask per object, in object order."""

    def __init__(self, paths: Sequence[Path]):
        self.paths = [Path(p) for p in paths]

    @classmethod
    def from_directory(cls, mask_dir: Path, scenario_id: str, count: int) -> "FileMaskProvider":
        """Masks named <scenario_id>_obj<i>.png; RequestError lists any missing file."""
        paths = [Path(mask_dir) / mask_filename(scenario_id, i) for i in range(1, count + 1)]
        missing = [p.name for p in paths if not p.exists()]
        if missing:
            raise RequestError(f"Missing mask files in {mask_dir}: {', '.join(missing)}")
        return cls(paths)

    def fetch(self, image: np.ndarray, phrases: Sequence[str]) -> RawMasks:
        if len(self.paths) != len(phrases):
            raise RequestError(f"{len(phrases)} objects but {len(self.paths)} mask files")
        height, width = image.shape[:2]
        masks = []
        for i, path in enumerate(self.paths, start=1):
            mask = load_mask_png(path)
            if mask.shape != (height, width):
                raise MaskShapeError(
                    f"Mask {i} ({path.name}) is {mask.shape[1]}x{mask.shape[0]}, image is {width}x{height}"
                )
            masks.append(mask > 0)
        return RawMasks(masks=masks, provenance="file")


class ArrayMaskProvider:
    """In-memory masks (tests, callers that already hold masks)."""

    def __init__(self, masks: Sequence[np.ndarray], confidences: Optional[Sequence[float]] = None):
        self.masks = [np.asarray(m) > 0 for m in masks]
        self.confidences = list(confidences) if confidences is not None else None

    def fetch(self, image: np.ndarray, phrases: Sequence[str]) -> RawMasks:
        if len(self.masks) != len(phrases):
            raise RequestError(f"{len(phrases)} objects but {len(self.masks)} masks")
        for i, mask in enumerate(self.masks, start=1):
            if mask.shape != image.shape[:2]:
                raise MaskShapeError(f"Mask {i} has shape {mask.shape}, image is {image.shape[:2]}")
        return RawMasks(masks=list(self.masks), provenance="file", confidences=self.confidences)


class SegmenterMaskProvider:
    """Masks from a segmentation service, one request per phrase."""

    def __init__(self, client: HttpSegmenterClient):
        self.client = client

    def fetch(self, image: np.ndarray, phrases: Sequence[str]) -> Union[RawMasks, FallbackSignal]:
        masks, confidences, failed = [], [], []
        for i, phrase in enumerate(phrases, start=1):
            # SegmenterUnavailable (transport) propagates; an empty answer does not
            response = self.client.segment(image, phrase)
            if response is None or not response.mask.any():
                failed.append(i)
                continue
            if response.mask.shape != image.shape[:2]:
                raise MaskShapeError(
                    f"Segmenter mask for '{phrase}' has shape {response.mask.shape}, image is {image.shape[:2]}"
                )
            masks.append(response.mask)
            confidences.append(response.confidence)

        if failed:
            names = ", ".join(f"'{phrases[i - 1]}'" for i in failed)
            return FallbackSignal(reason=f"segmentation failed for {names}", failed_objects=failed)
        return RawMasks(masks=masks, provenance="segmenter", confidences=confidences)


def acquire_masks(
    image: np.ndarray,
    phrases: Sequence[str],
    provider: MaskProvider,
    dilation_ratio: float,
    resolutions: Sequence[Resolution] = (),
) -> Union[MaskSet, FallbackSignal]:
    """
    Get one mask per object (prompt order) and build the MaskSet.

    Returns FallbackSignal instead of raising when segmentation fails; raises
    MaskShapeError on resolution mismatch and SegmenterUnavailable on
    transport failure.
    """
    raw = provider.fetch(image, phrases)
    if isinstance(raw, FallbackSignal):
        return raw
    return build_mask_set(
        raw.masks,
        dilation_ratio=dilation_ratio,
        resolutions=resolutions,
        provenance=raw.provenance,
        confidences=raw.confidences,
        image_shape=image.shape[:2],
    )
