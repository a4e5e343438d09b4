"""
Real-model adapters (optional integration stack).

- ClipPromptEncoder: CLIP text encoder via transformers
- ClipScorer: CLIP image-text cosine similarity × 100
- LcmBackend: latent-consistency U-Net + VAE via diffusers, with an attention
  processor that captures/substitutes self-attention Q/K and applies RGB-CAM
  in cross-attention

torch, diffusers and transformers are imported lazily so the desk-scale
stack never needs them.
"""

import threading
from typing import Optional

import numpy as np

from ..core.constants import EOS_TOKEN_ID
from ..core.errors import ConfigError, ShapeError
from ..prompts.ore import EmbeddingMatrix
from ..sampler.schedule import NoiseSchedule, lcm_schedule
from .base import ConditioningEmbeddings, Controls, ForwardOutput

DEFAULT_GUIDANCE_SCALE = 8.0
DEFAULT_IMAGE_SIZE = (512, 512)

# Latent-consistency boundary condition constants
SIGMA_DATA = 0.5
TIMESTEP_SCALING = 10.0


def _import_torch():
    try:
        import torch
    except ImportError as e:
        raise ConfigError("backend.kind=real needs torch (pip install torch diffusers transformers)") from e
    return torch


def boundary_scalings(timestep: int) -> tuple[float, float]:
    """(c_skip, c_out) of the latent-consistency parameterization."""
    scaled = timestep * TIMESTEP_SCALING
    c_skip = SIGMA_DATA ** 2 / (scaled ** 2 + SIGMA_DATA ** 2)
    c_out = scaled / (scaled ** 2 + SIGMA_DATA ** 2) ** 0.5
    return c_skip, c_out


class ClipPromptEncoder:
    """CLIP text encoder returning padded (77, d) embeddings. Not thread-safe."""

    thread_safe = False

    def __init__(self, model_id: str, device: str = "cpu", tokenizer=None, text_encoder=None):
        torch = _import_torch()
        from transformers import CLIPTextModel, CLIPTokenizer

        self.device = device
        self.tokenizer = tokenizer or CLIPTokenizer.from_pretrained(model_id, subfolder="tokenizer")
        self.text_encoder = text_encoder or CLIPTextModel.from_pretrained(model_id, subfolder="text_encoder")
        self.text_encoder.to(device).eval()
        self.length = self.tokenizer.model_max_length
        self.width = self.text_encoder.config.hidden_size
        self._torch = torch

    def tokenize(self, text: str) -> list[int]:
        return list(self.tokenizer(text, add_special_tokens=False)["input_ids"])

    def encode(self, text: str) -> EmbeddingMatrix:
        tokens = self.tokenizer(
            text, padding="max_length", max_length=self.length,
            truncation=True, return_tensors="pt",
        )
        input_ids = tokens.input_ids.to(self.device)
        with self._torch.no_grad():
            rows = self.text_encoder(input_ids)[0][0]
        ids = [int(t) for t in tokens.input_ids[0]]
        content_len = ids.index(EOS_TOKEN_ID) + 1 if EOS_TOKEN_ID in ids else len(ids)
        return EmbeddingMatrix(rows.float().cpu().numpy().astype(np.float64), tuple(ids), content_len)

    def describe(self) -> dict:
        return {"kind": "clip", "length": self.length, "width": self.width}


class ClipScorer:
    """100 · max(cos(image, text), 0) with CLIP embeddings."""

    def __init__(self, model_id: str, device: str = "cpu"):
        torch = _import_torch()
        from transformers import CLIPModel, CLIPProcessor

        self.device = device
        self.model = CLIPModel.from_pretrained(model_id).to(device).eval()
        self.processor = CLIPProcessor.from_pretrained(model_id)
        self._torch = torch
        self._lock = threading.Lock()

    def score(self, image: np.ndarray, text: str) -> float:
        pixels = np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
        inputs = self.processor(text=[text], images=[pixels], return_tensors="pt", padding=True)
        inputs = {k: v.to(self.device) for k, v in inputs.items()}
        with self._lock, self._torch.no_grad():
            out = self.model(**inputs)
        img = out.image_embeds / out.image_embeds.norm(dim=-1, keepdim=True)
        txt = out.text_embeds / out.text_embeds.norm(dim=-1, keepdim=True)
        cosine = float((img * txt).sum())
        return 100.0 * max(cosine, 0.0)

    def describe(self) -> dict:
        return {"kind": "clip"}


class _HookState:
    """Per-forward inputs shared by every AleAttnProcessor of one U-Net."""

    def __init__(self):
        self.controls: Controls = Controls()
        self.value_rows = None  # torch (1, L, d) spliced base embedding
        self.object_rows: list = []  # torch (1, L, d) per object
        self.masks: dict[int, tuple[list, object]] = {}  # pixels -> (object masks, background)
        self.captured: dict = {}
        self.calls: dict[str, int] = {}


class AleAttnProcessor:
    """
    Attention processor with ALE hooks.

    Self-attention: records (Q, K) and substitutes the source branch's on
    injection steps. Cross-attention: keys from the plain base embedding
    (encoder_hidden_states), values from the spliced base, RGB-CAM blend when
    regions are set.
    """

    def __init__(self, name: str, state: _HookState):
        self.name = name
        self.state = state

    def __call__(self, attn, hidden_states, encoder_hidden_states=None, attention_mask=None, temb=None, **kwargs):
        torch = _import_torch()
        state = self.state
        state.calls[self.name] = state.calls.get(self.name, 0) + 1
        is_cross = encoder_hidden_states is not None
        pixels = hidden_states.shape[1]

        query = attn.to_q(hidden_states)
        if is_cross:
            key = attn.to_k(encoder_hidden_states)
            value_source = state.value_rows if state.value_rows is not None else encoder_hidden_states
            value = attn.to_v(value_source)
        else:
            key = attn.to_k(hidden_states)
            value = attn.to_v(hidden_states)
            state.captured[self.name] = (query, key)
            query, key = state.controls.select_qk(self.name, (query, key))

        probs = attn.get_attention_scores(
            attn.head_to_batch_dim(query), attn.head_to_batch_dim(key), attention_mask,
        )
        out = torch.bmm(probs, attn.head_to_batch_dim(value))

        if is_cross and state.object_rows and pixels in state.masks:
            object_masks, _ = state.masks[pixels]
            for rows, mask in zip(state.object_rows, object_masks):
                v_obj = attn.head_to_batch_dim(attn.to_v(rows))
                out = torch.where(mask[None, :, None], torch.bmm(probs, v_obj), out)

        out = attn.batch_to_head_dim(out)
        out = attn.to_out[0](out)
        return attn.to_out[1](out)


class LcmBackend:
    """Latent-consistency backend; treat as single-consumer."""

    def __init__(self, model_id: str, device: str = "cpu", image_size: tuple[int, int] = DEFAULT_IMAGE_SIZE,
                 guidance_scale: Optional[float] = None):
        torch = _import_torch()
        from diffusers import LatentConsistencyModelPipeline

        self._torch = torch
        self.model_id = model_id
        self.device = device
        self.pipe = LatentConsistencyModelPipeline.from_pretrained(model_id, safety_checker=None)
        self.pipe.to(device)
        self.unet = self.pipe.unet
        self.vae = self.pipe.vae
        self.guidance_scale = guidance_scale if guidance_scale is not None else DEFAULT_GUIDANCE_SCALE
        self.image_size = tuple(image_size)

        factor = 2 ** (len(self.vae.config.block_out_channels) - 1)
        h, w = self.image_size[0] // factor, self.image_size[1] // factor
        self.latent_shape = (self.unet.config.in_channels, h, w)
        levels = len(self.unet.config.block_out_channels)
        self.attention_resolutions = tuple((h >> i, w >> i) for i in range(levels))

        self._state = _HookState()
        self.unet.set_attn_processor({
            name: AleAttnProcessor(name.removesuffix(".processor"), self._state)
            for name in self.unet.attn_processors.keys()
        })
        self._alphas_cumprod = self.pipe.scheduler.alphas_cumprod.cpu().numpy().astype(np.float64)
        self._lock = threading.Lock()

    def noise_schedule(self, num_steps: int) -> NoiseSchedule:
        return lcm_schedule(num_steps)

    def _tensor(self, array: np.ndarray):
        return self._torch.from_numpy(np.ascontiguousarray(array)).to(self.device, dtype=self.unet.dtype)

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        if image.shape[:2] != self.image_size:
            raise ShapeError(f"LCM backend expects {self.image_size} images, got {image.shape[:2]}")
        x = self._tensor(image.transpose(2, 0, 1)[None] * 2.0 - 1.0)
        with self._torch.no_grad():
            latent = self.vae.encode(x).latent_dist.mean * self.vae.config.scaling_factor
        return latent[0].float().cpu().numpy().astype(np.float64)

    def decode_latent(self, z: np.ndarray) -> np.ndarray:
        with self._torch.no_grad():
            x = self.vae.decode(self._tensor(z[None]) / self.vae.config.scaling_factor).sample
        image = (x[0].float().cpu().numpy().transpose(1, 2, 0) + 1.0) / 2.0
        return np.clip(image, 0.0, 1.0).astype(np.float64)

    def _set_regions(self, controls: Controls):
        state = self._state
        state.object_rows, state.masks = [], {}
        if controls.regions is None:
            return
        state.object_rows = [self._tensor(rows[None]) for rows in controls.regions.object_rows]
        for (h, w), level in controls.regions.pyramid.items():
            flat = [self._torch.from_numpy(np.asarray(m).reshape(-1)).to(self.device) for m in level]
            state.masks[h * w] = (flat[:-1], flat[-1])

    def forward(self, z: np.ndarray, timestep: int, embeddings: ConditioningEmbeddings,
                controls: Controls) -> ForwardOutput:
        torch = self._torch
        with self._lock:
            state = self._state
            state.controls = controls
            state.captured = {}
            state.value_rows = self._tensor(embeddings.value_rows[None])
            self._set_regions(controls)

            w = torch.tensor([self.guidance_scale - 1.0])
            w_embedding = self.pipe.get_guidance_scale_embedding(
                w, embedding_dim=self.unet.config.time_cond_proj_dim,
            ).to(self.device, dtype=self.unet.dtype)

            sample = self._tensor(z[None])
            with torch.no_grad():
                eps = self.unet(
                    sample, timestep,
                    encoder_hidden_states=self._tensor(embeddings.key_rows[None]),
                    timestep_cond=w_embedding,
                ).sample

            alpha = self._alphas_cumprod[timestep]
            eps_np = eps[0].float().cpu().numpy().astype(np.float64)
            x0 = (z - np.sqrt(1.0 - alpha) * eps_np) / np.sqrt(alpha)
            c_skip, c_out = boundary_scalings(timestep)
            captured = dict(state.captured)
            state.value_rows = None
        return ForwardOutput(z0_pred=c_out * x0 + c_skip * z, qk=captured)

    @property
    def hook_calls(self) -> dict[str, int]:
        return dict(self._state.calls)

    def describe(self) -> dict:
        return {
            "kind": "real",
            "model_id": self.model_id,
            "image_size": list(self.image_size),
            "guidance_scale": self.guidance_scale,
        }
