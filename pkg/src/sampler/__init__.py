"""
DDCM dual-branch sampling: noise schedules, source/target steps, background blending.
"""

from .schedule import (
    NoiseSchedule,
    scaled_linear_alphas_cumprod,
    lcm_timesteps,
    lcm_schedule,
    schedule_from_alphas,
)
from .ddcm import (
    DualBranchState,
    SourceStepResult,
    TargetStepResult,
    consistent_noise,
    recover_clean,
    renoise,
    call_backend,
    source_step,
    target_update,
    target_step,
    background_blend,
)

__all__ = [
    "NoiseSchedule",
    "scaled_linear_alphas_cumprod",
    "lcm_timesteps",
    "lcm_schedule",
    "schedule_from_alphas",
    "DualBranchState",
    "SourceStepResult",
    "TargetStepResult",
    "consistent_noise",
    "recover_clean",
    "renoise",
    "call_backend",
    "source_step",
    "target_update",
    "target_step",
    "background_blend",
]
