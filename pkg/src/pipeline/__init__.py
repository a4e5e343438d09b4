"""
Edit pipeline: requests, results, traces and the ALE orchestration loop.
"""

from .trace import StepRecord, EditTrace
from .edit import EditRequest, EditResult, AlePipeline, run_edit

__all__ = [
    "StepRecord",
    "EditTrace",
    "EditRequest",
    "EditResult",
    "AlePipeline",
    "run_edit",
]
