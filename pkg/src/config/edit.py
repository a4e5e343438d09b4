"""
Per-edit configuration for ALE Edit.

Defaults reproduce the published hyperparameters: 15 sampling steps, a mask
dilation ratio of 0.01 and a per-edit-type self-attention injection fraction.
"""

import dataclasses
from dataclasses import dataclass
from typing import Optional

from ..core.constants import (
    DEFAULT_DILATION_RATIO,
    DEFAULT_NUM_STEPS,
    EDIT_TYPES,
    EOS_STRATEGIES,
    MAX_DILATION_RATIO,
    SCHEDULE_BY_EDIT_TYPE,
)
from ..core.errors import ConfigError


@dataclass
class EditConfig:
    """Sampler, schedule and mask settings for one edit."""
    num_steps: int = DEFAULT_NUM_STEPS
    schedule_fraction: Optional[float] = None  # None = per edit type
    dilation_ratio: float = DEFAULT_DILATION_RATIO
    eos_strategy: str = "ore"
    guidance_scale: Optional[float] = None  # None = backend default
    seed: int = 0
    use_rgb_cam: bool = True
    use_bb: bool = True

    def resolve_fraction(self, edit_type: str) -> float:
        """Injection fraction for an edit type, honoring an explicit override."""
        if self.schedule_fraction is not None:
            return float(self.schedule_fraction)
        if edit_type not in SCHEDULE_BY_EDIT_TYPE:
            raise ConfigError(f"Unknown edit type '{edit_type}' (expected one of {', '.join(EDIT_TYPES)})")
        return SCHEDULE_BY_EDIT_TYPE[edit_type]

    def validate(self) -> "EditConfig":
        """Raise ConfigError on out-of-range values; returns self."""
        if isinstance(self.num_steps, bool) or not isinstance(self.num_steps, int) or self.num_steps < 1:
            raise ConfigError(f"num_steps must be a positive integer, got {self.num_steps!r}")
        if self.schedule_fraction is not None and not 0.0 <= self.schedule_fraction <= 1.0:
            raise ConfigError(f"schedule_fraction must be in [0, 1], got {self.schedule_fraction}")
        if not 0.0 <= self.dilation_ratio <= MAX_DILATION_RATIO:
            raise ConfigError(
                f"dilation_ratio must be in [0, {MAX_DILATION_RATIO}], got {self.dilation_ratio}"
            )
        if self.eos_strategy not in EOS_STRATEGIES:
            raise ConfigError(
                f"Unknown eos_strategy '{self.eos_strategy}' (expected one of {', '.join(EOS_STRATEGIES)})"
            )
        if self.guidance_scale is not None and self.guidance_scale < 0:
            raise ConfigError(f"guidance_scale must be non-negative, got {self.guidance_scale}")
        return self

    def replace(self, **changes) -> "EditConfig":
        """Copy with some fields changed."""
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EditConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})
