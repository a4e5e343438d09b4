"""
Backend contracts.

A diffusion backend declares its latent shape and attention resolutions and
exposes forward(z, timestep, embeddings, controls) -> consistency-denoised
prediction ẑ₀. Controls carry the two hook inputs: source Q/K for
self-attention injection and the per-object values and masks for RGB-CAM.
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional, Protocol, Sequence

import numpy as np

from ..attention.injection import QK, InjectionSchedule, inject_self_attention
from ..masks.masks import Resolution
from ..sampler.schedule import NoiseSchedule


@dataclass(frozen=True, eq=False)
class ConditioningEmbeddings:
    """Key rows (plain base encoding) and value rows (possibly spliced base)."""
    key_rows: np.ndarray
    value_rows: np.ndarray


@dataclass(frozen=True, eq=False)
class RegionValues:
    """
    RGB-CAM inputs.

    object_rows: K per-object embedding matrices (L × d), one per object
    pyramid: (h, w) -> K object masks followed by the background mask
    """
    object_rows: Sequence[np.ndarray]
    pyramid: Mapping[Resolution, Sequence[np.ndarray]]


@dataclass
class Controls:
    """Per-forward hook inputs. Defaults describe a plain forward pass."""
    step_index: int = 0
    schedule: Optional[InjectionSchedule] = None
    source_qk: Optional[Mapping[str, QK]] = None
    regions: Optional[RegionValues] = None

    @property
    def injecting(self) -> bool:
        return (
            self.source_qk is not None
            and self.schedule is not None
            and self.schedule.is_active(self.step_index)
        )

    def select_qk(self, layer_id: str, own: QK) -> QK:
        """Q/K a self-attention layer should use."""
        if self.source_qk is None or self.schedule is None:
            return own
        return inject_self_attention(self.source_qk[layer_id], own, self.step_index, self.schedule)


@dataclass
class ForwardOutput:
    """ẑ₀ prediction and the (unsubstituted) Q/K computed by each self-attention layer."""
    z0_pred: np.ndarray
    qk: dict[str, QK] = field(default_factory=dict)
    used_qk: dict[str, QK] = field(default_factory=dict)


class DiffusionBackend(Protocol):
    latent_shape: tuple[int, int, int]
    attention_resolutions: tuple[Resolution, ...]
    image_size: Resolution

    def noise_schedule(self, num_steps: int) -> NoiseSchedule:
        ...

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        ...

    def decode_latent(self, z: np.ndarray) -> np.ndarray:
        ...

    def forward(
        self,
        z: np.ndarray,
        timestep: int,
        embeddings: ConditioningEmbeddings,
        controls: Controls,
    ) -> ForwardOutput:
        ...

    def describe(self) -> dict:
        ...


class Scorer(Protocol):
    """Image-text similarity on a 0-100 scale."""

    def score(self, image: np.ndarray, text: str) -> float:
        ...
