"""
Deterministic toy diffusion backend.

A small fixed-parameter network that exercises every hook the editing
pipeline needs. Per attention resolution it pools the latent, lifts it to a
hidden width, runs one self-attention block (Q/K capture and substitution)
and one cross-attention block (plain or RGB-CAM), projects back to latent
channels and upsamples. The branch outputs add to a skip term.

The toy autoencoder maps RGB images to latents with a fixed 3 -> c channel
mix plus area downsampling; decoding applies the pseudo-inverse mix and
nearest upsampling.

Parameters live in a golden file: 8-byte magic, uint32 format version,
uint32 header length, JSON header (seed, config, array names and shapes),
then little-endian float64 array data in header order.
"""

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..attention.rgb_cam import AttentionContext, attention_map, rgb_cam_blend
from ..config.backend import ToyBackendConfig
from ..core.errors import ConfigError, ShapeError
from ..core.hashing import hash_uniforms
from ..core.logging import warn
from ..core.paths import get_toy_params_path
from ..sampler.schedule import TRAIN_TIMESTEPS, NoiseSchedule, lcm_schedule
from .base import ConditioningEmbeddings, Controls, ForwardOutput

MAGIC = b"ALETOYP\x00"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sII")

# Uniform [-1, 1) has variance 1/3
UNIT_VARIANCE = float(np.sqrt(3.0))


def layer_name(resolution: tuple[int, int]) -> str:
    return f"res{resolution[0]}x{resolution[1]}"


def _array_specs(config: ToyBackendConfig) -> list[tuple[str, tuple[int, ...], float]]:
    """(name, shape, scale) in generation order."""
    c = config.latent_shape[0]
    hid = config.hidden_width
    d = config.embed_width
    specs = [
        ("ae.mix", (c, 3), 0.5),
        ("head.skip", (c,), 0.05),
        ("head.bias", (c,), 0.05),
    ]
    for resolution in config.attention_resolutions:
        name = layer_name(resolution)
        specs += [
            (f"{name}.lift", (hid, c), 1.0 / np.sqrt(c)),
            (f"{name}.time", (hid,), 1.0),
            (f"{name}.self.q", (hid, hid), 1.0 / np.sqrt(hid)),
            (f"{name}.self.k", (hid, hid), 1.0 / np.sqrt(hid)),
            (f"{name}.self.v", (hid, hid), 1.0 / np.sqrt(hid)),
            (f"{name}.cross.q", (hid, hid), 1.0 / np.sqrt(hid)),
            (f"{name}.cross.k", (hid, d), 1.0 / np.sqrt(d)),
            (f"{name}.cross.v", (hid, d), 1.0 / np.sqrt(d)),
            (f"{name}.out", (c, hid), 0.1 / np.sqrt(hid)),
        ]
    return specs


@dataclass(eq=False)
class ToyParams:
    config: ToyBackendConfig
    arrays: dict[str, np.ndarray]

    @classmethod
    def generate(cls, config: ToyBackendConfig) -> "ToyParams":
        """Unit-variance uniform draws from the SHA-256 stream of config.seed, scaled per array."""
        config.validate()
        arrays = {}
        for name, shape, scale in _array_specs(config):
            count = int(np.prod(shape))
            values = hash_uniforms(config.seed, name, count).reshape(shape)
            arrays[name] = values * (scale * UNIT_VARIANCE)
        # skip starts near identity
        arrays["head.skip"] = arrays["head.skip"] + 1.0
        for arr in arrays.values():
            arr.flags.writeable = False
        return cls(config=config, arrays=arrays)

    def save(self, path: Path):
        """Write the golden file atomically."""
        names = [name for name, _, _ in _array_specs(self.config)]
        header = json.dumps({
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "arrays": [{"name": n, "shape": list(self.arrays[n].shape)} for n in names],
        }, sort_keys=True).encode("utf-8")

        path.parent.mkdir(parents=True, exist_ok=True)
        tmp_file = path.with_suffix(path.suffix + ".tmp")
        with open(tmp_file, "wb") as f:
            f.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(header)))
            f.write(header)
            for name in names:
                f.write(np.ascontiguousarray(self.arrays[name], dtype="<f8").tobytes())
        tmp_file.replace(path)

    @classmethod
    def load(cls, path: Path) -> "ToyParams":
        data = path.read_bytes()
        if len(data) < _HEADER.size:
            raise ConfigError(f"{path} is too short to be a toy parameter file")
        magic, version, header_len = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ConfigError(f"{path} is not a toy parameter file")
        if version != FORMAT_VERSION:
            raise ConfigError(f"{path} has format version {version}, expected {FORMAT_VERSION}")

        start = _HEADER.size
        header = json.loads(data[start:start + header_len].decode("utf-8"))
        offset = start + header_len
        arrays = {}
        for entry in header["arrays"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(shape).astype(np.float64)
            arr.flags.writeable = False
            arrays[entry["name"]] = arr
            offset += count * 8
        if offset != len(data):
            raise ConfigError(f"{path} has {len(data) - offset} trailing bytes")
        return cls(config=ToyBackendConfig.from_dict(header["config"]), arrays=arrays)


def load_toy_params(config: ToyBackendConfig, path: Optional[Path] = None) -> ToyParams:
    """Golden file when it matches config, otherwise generated from config.seed."""
    path = path or get_toy_params_path()
    if path.exists():
        params = ToyParams.load(path)
        if params.config == config:
            return params
    elif config == ToyBackendConfig():
        warn(f"Golden toy parameter file {path} is missing; regenerating (run scripts/make_toy_params.py)")
    return ToyParams.generate(config)


class ToyBackend:
    """Immutable after construction; safe to share across threads."""

    def __init__(self, params: ToyParams):
        self.params = params
        self.config = params.config
        self._p = params.arrays
        self._unmix = np.linalg.pinv(self._p["ae.mix"])

    @classmethod
    def from_config(cls, config: Optional[ToyBackendConfig] = None, params_path: Optional[Path] = None) -> "ToyBackend":
        config = (config or ToyBackendConfig()).validate()
        return cls(load_toy_params(config, params_path))

    @property
    def latent_shape(self) -> tuple[int, int, int]:
        return self.config.latent_shape

    @property
    def attention_resolutions(self) -> tuple[tuple[int, int], ...]:
        return self.config.attention_resolutions

    @property
    def image_size(self) -> tuple[int, int]:
        return self.config.image_size

    @property
    def self_attention_layers(self) -> list[str]:
        return [f"{layer_name(r)}.self" for r in self.attention_resolutions]

    def noise_schedule(self, num_steps: int) -> NoiseSchedule:
        return lcm_schedule(num_steps)

    # ------------------------------------------------------------------
    # Autoencoder
    # ------------------------------------------------------------------

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        """H×W×3 image in [0, 1] -> c×h×w latent."""
        H, W = self.image_size
        if image.shape != (H, W, 3):
            raise ShapeError(f"Toy autoencoder expects {H}x{W}x3 images, got {image.shape}")
        h, w = self.config.latent_resolution
        s = self.config.image_scale
        pooled = image.reshape(h, s, w, s, 3).mean(axis=(1, 3))
        return np.einsum("cr,hwr->chw", self._p["ae.mix"], 2.0 * pooled - 1.0)

    def decode_latent(self, z: np.ndarray) -> np.ndarray:
        """c×h×w latent -> H×W×3 image clipped to [0, 1]."""
        if z.shape != self.latent_shape:
            raise ShapeError(f"Latent shape {z.shape}, expected {self.latent_shape}")
        rgb = np.einsum("rc,chw->hwr", self._unmix, z)
        s = self.config.image_scale
        image = (rgb + 1.0) / 2.0
        image = np.repeat(np.repeat(image, s, axis=0), s, axis=1)
        return np.clip(image, 0.0, 1.0)

    # ------------------------------------------------------------------
    # Denoiser
    # ------------------------------------------------------------------

    def forward(
        self,
        z: np.ndarray,
        timestep: int,
        embeddings: ConditioningEmbeddings,
        controls: Controls,
    ) -> ForwardOutput:
        """Consistency-denoised prediction ẑ₀ plus per-layer self-attention Q/K."""
        if z.shape != self.latent_shape:
            raise ShapeError(f"Latent shape {z.shape}, expected {self.latent_shape}")
        expected_rows = (self.config.prompt_length, self.config.embed_width)
        for label, rows in (("key", embeddings.key_rows), ("value", embeddings.value_rows)):
            if rows.shape != expected_rows:
                raise ShapeError(f"{label} embedding shape {rows.shape}, expected {expected_rows}")

        p = self._p
        c, H, W = self.latent_shape
        t = timestep / TRAIN_TIMESTEPS
        out = p["head.skip"][:, None, None] * z + p["head.bias"][:, None, None]
        captured, used = {}, {}

        for resolution in self.attention_resolutions:
            name = layer_name(resolution)
            h, w = resolution
            fh, fw = H // h, W // w

            pooled = z.reshape(c, h, fh, w, fw).mean(axis=(2, 4))
            x = pooled.reshape(c, h * w).T @ p[f"{name}.lift"].T + t * p[f"{name}.time"]

            # Self-attention
            q = x @ p[f"{name}.self.q"].T
            k = x @ p[f"{name}.self.k"].T
            v = x @ p[f"{name}.self.v"].T
            layer = f"{name}.self"
            captured[layer] = (q, k)
            q_use, k_use = controls.select_qk(layer, (q, k))
            used[layer] = (q_use, k_use)
            x = x + attention_map(q_use, k_use) @ v

            # Cross-attention: keys from the plain base prompt
            M = attention_map(x @ p[f"{name}.cross.q"].T, embeddings.key_rows @ p[f"{name}.cross.k"].T)
            V_base = embeddings.value_rows @ p[f"{name}.cross.v"].T
            if controls.regions is not None:
                level = controls.regions.pyramid[resolution]
                ctx = AttentionContext(
                    M=M,
                    V_list=[rows @ p[f"{name}.cross.v"].T for rows in controls.regions.object_rows],
                    V_base=V_base,
                    object_masks=[m.reshape(-1) for m in level[:-1]],
                    background=level[-1].reshape(-1),
                    layer_id=f"{name}.cross",
                    resolution=resolution,
                )
                A = rgb_cam_blend(ctx)
            else:
                A = M @ V_base
            x = x + A

            y = (x @ p[f"{name}.out"].T).T.reshape(c, h, w)
            out = out + np.repeat(np.repeat(y, fh, axis=1), fw, axis=2)

        return ForwardOutput(z0_pred=out, qk=captured, used_qk=used)

    def describe(self) -> dict:
        return {"kind": "toy", "format_version": FORMAT_VERSION, "config": self.config.to_dict()}
