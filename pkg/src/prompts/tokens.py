"""
Deterministic mock tokenizer.

Lowercases and splits into alphanumeric runs and single punctuation
characters ("red-colored car" -> red, -, colored, car). Token ids are a stable
hash into the ordinary-vocabulary range so they never collide with BOS/EOS.
"""

import re

from ..core.hashing import stable_hash

_TOKEN_PATTERN = re.compile(r"[a-z0-9]+|[^\sa-z0-9]")

TOKEN_ID_LOW = 1000
TOKEN_ID_HIGH = 49000


def tokenize_words(text: str) -> list[str]:
    """Split text into mock tokens."""
    return _TOKEN_PATTERN.findall(text.lower())


def mock_token_id(token: str) -> int:
    return TOKEN_ID_LOW + stable_hash("token", token) % (TOKEN_ID_HIGH - TOKEN_ID_LOW)


def mock_token_ids(text: str) -> list[int]:
    """Content token ids of text (no BOS/EOS)."""
    return [mock_token_id(t) for t in tokenize_words(text)]
