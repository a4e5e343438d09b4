"""
Self-attention Q/K injection schedule.

Step indices run 0..N-1 with 0 the noisiest step. A fraction s injects the
source branch's queries and keys during the earliest ceil(s·N) steps.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..core.errors import RangeError, ShapeError

QK = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class InjectionSchedule:
    fraction: float
    total_steps: int
    active_steps: frozenset[int]

    def is_active(self, step_index: int) -> bool:
        return step_index in self.active_steps

    @property
    def num_active(self) -> int:
        return len(self.active_steps)


def resolve_schedule(fraction: float, total_steps: int) -> InjectionSchedule:
    """Earliest ceil(fraction · total_steps) steps are active."""
    if isinstance(total_steps, bool) or not isinstance(total_steps, int) or total_steps < 1:
        raise RangeError(f"total_steps must be a positive integer, got {total_steps!r}")
    if not 0.0 <= fraction <= 1.0:
        raise RangeError(f"fraction must be in [0, 1], got {fraction}")
    # 0.6 * 15 is 9.000000000000002 in binary floating point
    count = math.ceil(round(fraction * total_steps, 9))
    return InjectionSchedule(
        fraction=float(fraction),
        total_steps=total_steps,
        active_steps=frozenset(range(count)),
    )


def inject_self_attention(
    source_qk: QK,
    target_qk: QK,
    step_index: int,
    schedule: InjectionSchedule,
) -> QK:
    """
    Q/K for one target self-attention layer.

    Source Q/K on active steps, the target's own otherwise. Values always stay
    the target branch's.
    """
    (q_src, k_src), (q_tgt, k_tgt) = source_qk, target_qk
    if np.shape(q_src) != np.shape(q_tgt) or np.shape(k_src) != np.shape(k_tgt):
        raise ShapeError(
            f"Source Q/K {np.shape(q_src)}/{np.shape(k_src)} do not match "
            f"target {np.shape(q_tgt)}/{np.shape(k_tgt)}"
        )
    if schedule.is_active(step_index):
        return source_qk
    return target_qk
