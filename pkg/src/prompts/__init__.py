"""
Prompt decomposition and object-restricted embeddings.
"""

from .tokens import tokenize_words, mock_token_id, mock_token_ids
from .pairs import (
    SIDES,
    ObjectPromptPair,
    make_pairs,
    validate_pairs,
    side_texts,
    locate_spans,
    build_base_prompt,
)
from .ore import (
    EmbeddingMatrix,
    TextEncoder,
    OreSet,
    splice_spans,
    encode_object_restricted,
)

__all__ = [
    "tokenize_words",
    "mock_token_id",
    "mock_token_ids",
    "SIDES",
    "ObjectPromptPair",
    "make_pairs",
    "validate_pairs",
    "side_texts",
    "locate_spans",
    "build_base_prompt",
    "EmbeddingMatrix",
    "TextEncoder",
    "OreSet",
    "splice_spans",
    "encode_object_restricted",
]
