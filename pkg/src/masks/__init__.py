"""
Mask engine: acquisition, dilation, background and per-resolution pyramids.
"""

from .masks import (
    PROVENANCES,
    FallbackSignal,
    MaskSet,
    check_same_shape,
    disjointify,
    dilation_radius,
    dilate_by_radius,
    dilate_mask,
    build_background_mask,
    downsample_mask,
    downsample_pyramid,
    build_mask_set,
)
from .providers import (
    RawMasks,
    MaskProvider,
    FileMaskProvider,
    ArrayMaskProvider,
    SegmenterMaskProvider,
    mask_filename,
    acquire_masks,
)
from .segmenter import SegmentationResponse, SegmenterClientConfig, HttpSegmenterClient

__all__ = [
    "PROVENANCES",
    "FallbackSignal",
    "MaskSet",
    "check_same_shape",
    "disjointify",
    "dilation_radius",
    "dilate_by_radius",
    "dilate_mask",
    "build_background_mask",
    "downsample_mask",
    "downsample_pyramid",
    "build_mask_set",
    "RawMasks",
    "MaskProvider",
    "FileMaskProvider",
    "ArrayMaskProvider",
    "SegmenterMaskProvider",
    "mask_filename",
    "acquire_masks",
    "SegmentationResponse",
    "SegmenterClientConfig",
    "HttpSegmenterClient",
]
