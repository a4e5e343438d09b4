"""
Toy backend configuration.
"""

import dataclasses
from dataclasses import dataclass

from ..core.constants import PROMPT_LENGTH
from ..core.errors import ConfigError


@dataclass
class ToyBackendConfig:
    """Shapes and seeds of the deterministic toy diffusion stack."""
    latent_shape: tuple[int, int, int] = (4, 16, 16)
    attention_resolutions: tuple[tuple[int, int], ...] = ((16, 16), (8, 8))
    embed_width: int = 32
    prompt_length: int = PROMPT_LENGTH
    hidden_width: int = 16
    image_scale: int = 8  # image pixels per latent pixel
    seed: int = 0
    encoder_seed: int = 0

    def __post_init__(self):
        # JSON round trips hand back lists
        self.latent_shape = tuple(int(v) for v in self.latent_shape)
        self.attention_resolutions = tuple(
            (int(h), int(w)) for h, w in self.attention_resolutions
        )

    @property
    def latent_resolution(self) -> tuple[int, int]:
        return self.latent_shape[1], self.latent_shape[2]

    @property
    def image_size(self) -> tuple[int, int]:
        h, w = self.latent_resolution
        return h * self.image_scale, w * self.image_scale

    def validate(self) -> "ToyBackendConfig":
        """Raise ConfigError unless every attention resolution divides the latent one."""
        if len(self.latent_shape) != 3 or min(self.latent_shape) < 1:
            raise ConfigError(f"latent_shape must be (c, h, w), got {self.latent_shape}")
        lat_h, lat_w = self.latent_resolution
        if not self.attention_resolutions:
            raise ConfigError("at least one attention resolution is required")
        for h, w in self.attention_resolutions:
            if h < 1 or w < 1 or lat_h % h or lat_w % w:
                raise ConfigError(
                    f"attention resolution {h}x{w} does not divide latent resolution {lat_h}x{lat_w}"
                )
        for name in ("embed_width", "prompt_length", "hidden_width", "image_scale"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.prompt_length < 3:
            raise ConfigError("prompt_length must leave room for BOS, one token and EOS")
        return self

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["latent_shape"] = list(self.latent_shape)
        data["attention_resolutions"] = [list(r) for r in self.attention_resolutions]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ToyBackendConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})
