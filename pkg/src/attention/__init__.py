"""
Attention control: RGB-CAM blending and self-attention Q/K injection.
"""

from .rgb_cam import (
    softmax,
    attention_map,
    AttentionContext,
    check_partition,
    rgb_cam_blend,
)
from .injection import QK, InjectionSchedule, resolve_schedule, inject_self_attention

__all__ = [
    "softmax",
    "attention_map",
    "AttentionContext",
    "check_partition",
    "rgb_cam_blend",
    "QK",
    "InjectionSchedule",
    "resolve_schedule",
    "inject_self_attention",
]
