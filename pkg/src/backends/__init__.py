"""
Diffusion backends, text encoders and similarity scorers.

The toy backend, mock encoder and mock scorer are deterministic numpy
implementations for desk-scale verification. Real adapters (src.backends.real)
need the optional torch/diffusers/transformers stack.
"""

from .base import (
    ConditioningEmbeddings,
    RegionValues,
    Controls,
    ForwardOutput,
    DiffusionBackend,
    Scorer,
)
from .mock_encoder import MockEncoder
from .mock_scorer import MockScorer, FLOOR_SCORE, NEUTRAL_SCORE
from .toy import ToyParams, ToyBackend, load_toy_params, layer_name
from .factory import make_backend, make_encoder, make_scorer

__all__ = [
    "ConditioningEmbeddings",
    "RegionValues",
    "Controls",
    "ForwardOutput",
    "DiffusionBackend",
    "Scorer",
    "MockEncoder",
    "MockScorer",
    "FLOOR_SCORE",
    "NEUTRAL_SCORE",
    "ToyParams",
    "ToyBackend",
    "load_toy_params",
    "layer_name",
    "make_backend",
    "make_encoder",
    "make_scorer",
]
