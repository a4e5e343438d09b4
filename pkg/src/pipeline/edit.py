"""
ALE edit orchestration.

Per request:
1. Build base prompts and object-restricted embeddings
2. Acquire masks (or fall back to unmasked editing)
3. Encode the source image; both branches start from the same noise
4. Per step: source step (virtual inversion, Q/K capture), target step
   (Q/K injection, RGB-CAM), background blending
5. Decode the final target latent
"""

import contextlib
import threading
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ..attention.injection import resolve_schedule
from ..backends.base import ConditioningEmbeddings, Controls, DiffusionBackend, RegionValues
from ..config.edit import EditConfig
from ..core.constants import DEFAULT_EDIT_TYPE, EDIT_TYPES
from ..core.errors import RequestError
from ..core.files import resize_image
from ..masks.masks import FallbackSignal, MaskSet
from ..masks.providers import MaskProvider, acquire_masks
from ..prompts.ore import OreSet, TextEncoder, encode_object_restricted
from ..prompts.pairs import ObjectPromptPair, validate_pairs
from ..sampler.ddcm import (
    DualBranchState,
    background_blend,
    recover_clean,
    source_step,
    target_step,
)
from .trace import EditTrace, StepRecord


@dataclass
class EditRequest:
    """Source image (H×W×3 in [0, 1]) plus ordered object prompt pairs."""
    image: np.ndarray
    pairs: Sequence[ObjectPromptPair]
    edit_type: str = DEFAULT_EDIT_TYPE
    config: EditConfig = field(default_factory=EditConfig)
    stripped_prompts: Optional[Sequence[str]] = None
    image_id: str = ""
    debug: bool = False

    @property
    def phrases(self) -> list[str]:
        return [p.segment_phrase for p in self.pairs]

    @property
    def num_objects(self) -> int:
        return len(self.pairs)

    def validate(self) -> "EditRequest":
        validate_pairs(self.pairs)
        if self.edit_type not in EDIT_TYPES:
            raise RequestError(f"Unknown edit type '{self.edit_type}' (expected one of {', '.join(EDIT_TYPES)})")
        image = np.asarray(self.image)
        if image.ndim != 3 or image.shape[2] != 3:
            raise RequestError(f"Image must be H×W×3, got shape {image.shape}")
        self.config.validate()
        return self


@dataclass
class EditResult:
    edited_image: np.ndarray
    source_image: np.ndarray  # source at backend resolution
    final_latent: np.ndarray
    source_latent: np.ndarray
    ore: OreSet
    mask_set: Optional[MaskSet]
    fallback: Optional[FallbackSignal]
    schedule_fraction: float
    injected_steps: int
    trace: EditTrace
    runtime_sec: float = 0.0
    forward_calls: dict[str, int] = field(default_factory=dict)

    @property
    def provenance(self) -> str:
        return self.trace.provenance


class AlePipeline:
    """
    Runs edits against one backend and encoder.

    One instance per worker thread; no state is shared between edits apart
    from the (immutable or lock-guarded) backend and encoder.
    """

    def __init__(self, backend: DiffusionBackend, encoder: TextEncoder):
        self.backend = backend
        self.encoder = encoder
        thread_safe = getattr(encoder, "thread_safe", False)
        self._encoder_lock = contextlib.nullcontext() if thread_safe else threading.Lock()

    @property
    def mask_resolutions(self) -> list[tuple[int, int]]:
        """Attention, latent and output image resolutions."""
        _, h, w = self.backend.latent_shape
        resolutions = list(self.backend.attention_resolutions) + [(h, w), tuple(self.backend.image_size)]
        return list(dict.fromkeys(tuple(r) for r in resolutions))

    def _encode(self, request: EditRequest) -> tuple[OreSet, OreSet]:
        strategy = request.config.eos_strategy
        with self._encoder_lock:
            target = encode_object_restricted(
                request.pairs, "target", self.encoder, strategy, request.stripped_prompts,
            )
            # Source branch reconstructs; it always uses the plain base encoding
            source = encode_object_restricted(request.pairs, "source", self.encoder, "naive")
        return source, target

    def _masks(self, request: EditRequest, provider: Optional[MaskProvider]) -> Union[MaskSet, FallbackSignal]:
        if provider is None:
            return FallbackSignal(reason="no mask provider")
        return acquire_masks(
            np.asarray(request.image),
            request.phrases,
            provider,
            dilation_ratio=request.config.dilation_ratio,
            resolutions=self.mask_resolutions,
        )

    def edit(self, request: EditRequest, mask_provider: Optional[MaskProvider] = None) -> EditResult:
        """Run one edit end to end; single-threaded and deterministic given the seed."""
        start = time.perf_counter()
        request.validate()
        config = request.config
        backend = self.backend

        fraction = config.resolve_fraction(request.edit_type)
        injection = resolve_schedule(fraction, config.num_steps)
        noise_schedule = backend.noise_schedule(config.num_steps).validate()

        source_ore, target_ore = self._encode(request)

        masks = self._masks(request, mask_provider)
        if isinstance(masks, FallbackSignal):
            fallback, mask_set = masks, None
            trace = EditTrace(provenance=masks.provenance, fallback_reason=masks.reason)
        else:
            fallback, mask_set = None, masks
            trace = EditTrace(provenance=masks.provenance)
        if request.debug:
            trace.latents = {}

        use_rgb_cam = mask_set is not None and config.use_rgb_cam
        use_bb = mask_set is not None and config.use_bb
        regions = None
        if use_rgb_cam:
            regions = RegionValues(
                object_rows=[m.rows for m in target_ore.per_object],
                pyramid=mask_set.pyramid,
            )
        m_back_latent = None
        if use_bb:
            _, lat_h, lat_w = backend.latent_shape
            m_back_latent = mask_set.pyramid[(lat_h, lat_w)][-1]

        source_emb = ConditioningEmbeddings(source_ore.base_plain.rows, source_ore.base_plain.rows)
        target_emb = ConditioningEmbeddings(target_ore.base_plain.rows, target_ore.base.rows)

        source_image = resize_image(np.asarray(request.image, dtype=np.float64), backend.image_size)
        z0_src = backend.encode_image(source_image)

        rng = np.random.default_rng(config.seed)
        z_init = rng.standard_normal(backend.latent_shape)
        state = DualBranchState(z_src=z_init, z_tgt=z_init.copy(), z0_src=z0_src, schedule=noise_schedule)
        calls = {"source": 0, "target": 0}

        while not state.done:
            n = state.step_index
            noise = rng.standard_normal(backend.latent_shape)

            src = source_step(state, noise, backend, source_emb, Controls(step_index=n))
            calls["source"] += 1

            controls = Controls(
                step_index=n,
                schedule=injection,
                source_qk=src.output.qk,
                regions=regions,
            )
            tgt = target_step(state, src.z0_pred, backend, target_emb, controls, noise)
            calls["target"] += 1

            z_tgt_next = tgt.z_next
            if m_back_latent is not None:
                z_tgt_next = background_blend(src.z_next, tgt.z_next, m_back_latent)

            recovered = recover_clean(state.z_src, src.eps, state.alpha)
            trace.steps.append(StepRecord(
                step=n,
                timestep=state.timestep,
                alpha=state.alpha,
                alpha_next=state.alpha_next,
                injected=injection.is_active(n),
                rgb_cam=regions is not None,
                bb=m_back_latent is not None,
                recovered_z0_error=float(np.max(np.abs(recovered - z0_src))),
            ))
            trace.record_latents(z_src=state.z_src, z_tgt=state.z_tgt, noise=noise)
            state = state.advance(src.z_next, z_tgt_next, noise)

        trace.record_latents(z_src=state.z_src, z_tgt=state.z_tgt, noise=np.zeros(backend.latent_shape))
        edited = backend.decode_latent(state.z_tgt)

        return EditResult(
            edited_image=edited,
            source_image=source_image,
            final_latent=state.z_tgt,
            source_latent=z0_src,
            ore=target_ore,
            mask_set=mask_set,
            fallback=fallback,
            schedule_fraction=fraction,
            injected_steps=injection.num_active,
            trace=trace,
            runtime_sec=time.perf_counter() - start,
            forward_calls=calls,
        )


def run_edit(
    request: EditRequest,
    backend: DiffusionBackend,
    mask_provider: Optional[MaskProvider],
    encoder: TextEncoder,
) -> EditResult:
    """Run one edit with a throwaway AlePipeline."""
    return AlePipeline(backend, encoder).edit(request, mask_provider)
