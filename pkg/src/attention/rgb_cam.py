"""
Region-guided cross-attention blending (RGB-CAM).

The attention map M comes from the target queries and the plain base-prompt
keys. Each pixel then reads values from exactly one matrix: V_i = W_v(E'_i)
inside object i's mask, V_base = W_v(E'_base) in the background.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.errors import PartitionError, ShapeError


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def attention_map(q: np.ndarray, k: np.ndarray, scale: Optional[float] = None) -> np.ndarray:
    """Row-stochastic attention map softmax(q kᵀ · scale), P × L."""
    if q.ndim != 2 or k.ndim != 2 or q.shape[1] != k.shape[1]:
        raise ShapeError(f"Query {q.shape} and key {k.shape} widths do not match")
    if scale is None:
        scale = 1.0 / np.sqrt(q.shape[1])
    return softmax((q @ k.T) * scale, axis=-1)


@dataclass
class AttentionContext:
    """
    Inputs of one RGB-CAM evaluation.

    M: P × L attention map
    V_list: K value matrices (L × d_v), one per object
    V_base: L × d_v value matrix of the spliced base embedding
    object_masks: K flat masks of length P
    background: flat mask of length P
    """
    M: np.ndarray
    V_list: Sequence[np.ndarray]
    V_base: np.ndarray
    object_masks: Sequence[np.ndarray]
    background: np.ndarray
    layer_id: str = ""
    resolution: Optional[tuple[int, int]] = None


def check_partition(masks: Sequence[np.ndarray]):
    """PartitionError unless every pixel belongs to exactly one mask."""
    stacked = np.stack([np.asarray(m) for m in masks])
    if not np.isin(stacked, (0, 1)).all():
        raise PartitionError("Masks must be binary")
    counts = stacked.astype(np.int64).sum(axis=0)
    if not (counts == 1).all():
        bad = int((counts != 1).sum())
        raise PartitionError(f"{bad} pixels are covered by zero or several regions")


def _check_shapes(ctx: AttentionContext):
    if ctx.M.ndim != 2:
        raise ShapeError(f"Attention map must be 2-D, got {ctx.M.shape}")
    P, L = ctx.M.shape
    if not ctx.V_list:
        raise ShapeError("RGB-CAM needs at least one object value matrix")
    if len(ctx.V_list) != len(ctx.object_masks):
        raise ShapeError(f"{len(ctx.V_list)} value matrices but {len(ctx.object_masks)} masks")
    if ctx.V_base.ndim != 2 or ctx.V_base.shape[0] != L:
        raise ShapeError(f"V_base shape {ctx.V_base.shape} does not fit attention map {ctx.M.shape}")
    for i, V in enumerate(ctx.V_list, start=1):
        if V.shape != ctx.V_base.shape:
            raise ShapeError(f"V_{i} shape {V.shape} differs from V_base {ctx.V_base.shape}")
    for mask in list(ctx.object_masks) + [ctx.background]:
        if np.shape(mask) != (P,):
            raise ShapeError(f"Mask shape {np.shape(mask)} does not match {P} pixels")
    if ctx.resolution is not None and ctx.resolution[0] * ctx.resolution[1] != P:
        raise ShapeError(f"Resolution {ctx.resolution} does not have {P} pixels")


def rgb_cam_blend(ctx: AttentionContext) -> np.ndarray:
    """
    Blended cross-attention output A (P × d_v).

    Row p of A is M[p] · V_i when p lies in object i's mask and M[p] · V_base
    when p is background. Equal to Σᵢ (M ⊙ mᵢ) Vᵢ + (M ⊙ m_back) V_base for a
    partition, evaluated as a per-row select.
    """
    _check_shapes(ctx)
    check_partition(list(ctx.object_masks) + [ctx.background])

    A = ctx.M @ ctx.V_base
    for mask, V in zip(ctx.object_masks, ctx.V_list):
        A = np.where(np.asarray(mask, dtype=bool)[:, None], ctx.M @ V, A)
    return A
