"""
Dual-branch DDCM steps.

The source branch never runs an inversion: its latent keeps the closed-form
link z = √ᾱ · z0_src + √(1 − ᾱ) · ε to the known clean latent, so the noise
consistent with the current latent is recovered algebraically and the next
latent is re-noised from z0_src. The target branch is anchored to the same
z0_src, shifted by the model's prediction difference ẑ₀_tgt − ẑ₀_src, and
re-noised with the same fresh noise sample.
"""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

import numpy as np

from ..core.errors import AleError, BackendError, ScheduleError, ShapeError
from .schedule import NoiseSchedule

if TYPE_CHECKING:
    from ..backends.base import ConditioningEmbeddings, Controls, DiffusionBackend, ForwardOutput


@dataclass
class DualBranchState:
    """Latents of both branches at step_index, before that step runs."""
    z_src: np.ndarray
    z_tgt: np.ndarray
    z0_src: np.ndarray
    schedule: NoiseSchedule
    step_index: int = 0
    fresh_noise: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if self.z_src.shape != self.z_tgt.shape or self.z_src.shape != self.z0_src.shape:
            raise ShapeError(
                f"Latent shapes differ: src {self.z_src.shape}, tgt {self.z_tgt.shape}, z0 {self.z0_src.shape}"
            )

    @property
    def alpha(self) -> float:
        return float(self.schedule.alphas[self.step_index])

    @property
    def alpha_next(self) -> float:
        return float(self.schedule.alphas_next[self.step_index])

    @property
    def timestep(self) -> int:
        return self.schedule.timesteps[self.step_index]

    @property
    def done(self) -> bool:
        return self.step_index >= self.schedule.num_steps

    def advance(self, z_src: np.ndarray, z_tgt: np.ndarray, noise: np.ndarray) -> "DualBranchState":
        return DualBranchState(
            z_src=z_src,
            z_tgt=z_tgt,
            z0_src=self.z0_src,
            schedule=self.schedule,
            step_index=self.step_index + 1,
            fresh_noise=self.fresh_noise + [noise],
        )


@dataclass
class SourceStepResult:
    z_next: np.ndarray
    eps: np.ndarray  # noise consistent with z_src and z0_src
    z0_pred: Optional[np.ndarray]  # backend ẑ₀ on z_src
    output: Optional["ForwardOutput"] = None


@dataclass
class TargetStepResult:
    z_next: np.ndarray
    z0_pred: np.ndarray
    output: Optional["ForwardOutput"] = None


def consistent_noise(z: np.ndarray, z0: np.ndarray, alpha: float) -> np.ndarray:
    """ε̂ = (z − √ᾱ · z0) / √(1 − ᾱ)."""
    return (z - np.sqrt(alpha) * z0) / np.sqrt(1.0 - alpha)


def recover_clean(z: np.ndarray, eps: np.ndarray, alpha: float) -> np.ndarray:
    """z0 = (z − √(1 − ᾱ) · ε) / √ᾱ."""
    return (z - np.sqrt(1.0 - alpha) * eps) / np.sqrt(alpha)


def renoise(z0: np.ndarray, alpha: float, noise: np.ndarray) -> np.ndarray:
    """√ᾱ · z0 + √(1 − ᾱ) · noise; exactly z0 at ᾱ = 1."""
    return np.sqrt(alpha) * z0 + np.sqrt(1.0 - alpha) * noise


def _check_alpha(state: DualBranchState):
    alpha = state.alpha
    if not 0.0 < alpha < 1.0:
        raise ScheduleError(
            f"alpha at step {state.step_index} is {alpha}; a non-terminal step needs 0 < alpha < 1"
        )


def call_backend(backend: "DiffusionBackend", z, timestep, embeddings, controls, step_index: int) -> "ForwardOutput":
    """backend.forward, with foreign exceptions wrapped in BackendError."""
    try:
        return backend.forward(z, timestep, embeddings, controls)
    except AleError:
        raise
    except Exception as e:
        raise BackendError(f"Backend failed at step {step_index}: {type(e).__name__}: {e}") from e


def source_step(
    state: DualBranchState,
    noise: np.ndarray,
    backend: Optional["DiffusionBackend"] = None,
    embeddings: Optional["ConditioningEmbeddings"] = None,
    controls: Optional["Controls"] = None,
) -> SourceStepResult:
    """
    Advance the source branch by virtual inversion.

    Args:
        state: Current dual-branch state
        noise: Fresh noise for this step (shared with the target branch)
        backend/embeddings/controls: When given, the backend's ẑ₀ on z_src is
            computed for the target correction and its Q/K for injection

    Returns:
        SourceStepResult with the next source latent
    """
    _check_alpha(state)
    if noise.shape != state.z_src.shape:
        raise ShapeError(f"Noise shape {noise.shape}, latent shape {state.z_src.shape}")

    eps = consistent_noise(state.z_src, state.z0_src, state.alpha)
    output = None
    z0_pred = None
    if backend is not None:
        output = call_backend(backend, state.z_src, state.timestep, embeddings, controls, state.step_index)
        z0_pred = output.z0_pred
    z_next = renoise(state.z0_src, state.alpha_next, noise)
    return SourceStepResult(z_next=z_next, eps=eps, z0_pred=z0_pred, output=output)


def target_update(
    z0_src: np.ndarray,
    z0_tgt_pred: np.ndarray,
    z0_src_pred: np.ndarray,
    alpha_next: float,
    noise: np.ndarray,
) -> np.ndarray:
    """√ᾱ_next · (z0_src + (ẑ₀_tgt − ẑ₀_src)) + √(1 − ᾱ_next) · noise."""
    return renoise(z0_src + (z0_tgt_pred - z0_src_pred), alpha_next, noise)


def target_step(
    state: DualBranchState,
    z0_src_pred: np.ndarray,
    backend: "DiffusionBackend",
    embeddings: "ConditioningEmbeddings",
    controls: "Controls",
    noise: np.ndarray,
) -> TargetStepResult:
    """
    Advance the target branch.

    With ẑ₀_tgt == ẑ₀_src the result equals the source branch's next latent
    bit for bit, since both re-noise z0_src with the same noise.
    """
    _check_alpha(state)
    output = call_backend(backend, state.z_tgt, state.timestep, embeddings, controls, state.step_index)
    z_next = target_update(state.z0_src, output.z0_pred, z0_src_pred, state.alpha_next, noise)
    return TargetStepResult(z_next=z_next, z0_pred=output.z0_pred, output=output)


def background_blend(z_src: np.ndarray, z_tgt: np.ndarray, m_back_latent: np.ndarray) -> np.ndarray:
    """m_back ⊙ z_src + (1 − m_back) ⊙ z_tgt, as an exact per-pixel select."""
    if z_src.shape != z_tgt.shape:
        raise ShapeError(f"Source latent {z_src.shape} and target latent {z_tgt.shape} differ")
    mask = np.asarray(m_back_latent)
    if mask.shape != z_src.shape[-2:]:
        raise ShapeError(f"Background mask {mask.shape} does not match latent {z_src.shape[-2:]}")
    return np.where(mask.astype(bool)[None], z_src, z_tgt)
