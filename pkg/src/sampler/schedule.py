"""
Noise schedules for few-step consistency sampling.

Step n consumes the cumulative signal level alphas[n]; the next level is
alphas[n + 1], and 1.0 (clean) after the final step.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..core.errors import RangeError, ScheduleError

TRAIN_TIMESTEPS = 1000
BETA_START = 0.00085
BETA_END = 0.012
ORIGIN_STEPS = 50


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    timesteps: tuple[int, ...]
    alphas: np.ndarray
    alphas_next: np.ndarray = field(init=False)

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=np.float64)
        alphas.flags.writeable = False
        alphas_next = np.append(alphas[1:], 1.0)
        alphas_next.flags.writeable = False
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "alphas_next", alphas_next)
        object.__setattr__(self, "timesteps", tuple(int(t) for t in self.timesteps))

    @property
    def num_steps(self) -> int:
        return len(self.alphas)

    def validate(self) -> "NoiseSchedule":
        """ScheduleError unless every consumed level is in (0, 1) and levels increase."""
        if self.num_steps < 1:
            raise ScheduleError("Schedule has no steps")
        if len(self.timesteps) != self.num_steps:
            raise ScheduleError(f"{len(self.timesteps)} timesteps for {self.num_steps} levels")
        for n, alpha in enumerate(self.alphas):
            if not 0.0 < alpha < 1.0:
                raise ScheduleError(f"alpha at step {n} is {alpha}; must lie strictly inside (0, 1)")
        if np.any(np.diff(self.alphas) <= 0):
            raise ScheduleError("alphas must increase from the noisiest step to the cleanest")
        return self

    def to_dict(self) -> dict:
        return {"timesteps": list(self.timesteps), "alphas": [float(a) for a in self.alphas]}


def scaled_linear_alphas_cumprod(
    train_steps: int = TRAIN_TIMESTEPS,
    beta_start: float = BETA_START,
    beta_end: float = BETA_END,
) -> np.ndarray:
    betas = np.linspace(beta_start ** 0.5, beta_end ** 0.5, train_steps, dtype=np.float64) ** 2
    return np.cumprod(1.0 - betas)


def lcm_timesteps(
    num_steps: int,
    train_steps: int = TRAIN_TIMESTEPS,
    origin_steps: int = ORIGIN_STEPS,
) -> list[int]:
    """Latent-consistency timestep selection: a strided walk down the origin grid."""
    if num_steps < 1 or num_steps > origin_steps:
        raise RangeError(f"num_steps must be in [1, {origin_steps}], got {num_steps}")
    stride = train_steps // origin_steps
    origin = np.arange(1, origin_steps + 1) * stride - 1
    skipping = origin_steps // num_steps
    return [int(t) for t in origin[::-1][::skipping][:num_steps]]


def lcm_schedule(num_steps: int) -> NoiseSchedule:
    """Noise schedule used by the toy backend and the latent-consistency adapter."""
    alphas_cumprod = scaled_linear_alphas_cumprod()
    timesteps = lcm_timesteps(num_steps)
    return NoiseSchedule(tuple(timesteps), alphas_cumprod[timesteps]).validate()


def schedule_from_alphas(alphas: Sequence[float], timesteps: Sequence[int] = ()) -> NoiseSchedule:
    """Custom schedule (timesteps default to a descending 0..999 spread)."""
    if not timesteps:
        timesteps = [int(round(999 * (1 - i / max(len(alphas), 1)))) for i in range(len(alphas))]
    return NoiseSchedule(tuple(timesteps), np.asarray(alphas, dtype=np.float64))
