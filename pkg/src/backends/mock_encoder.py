"""
Deterministic mock text encoder.

Every token id maps to a fixed pseudo-random unit vector. Two effects of a
causal (autoregressive) encoder are emulated:
- a content row mixes its token vector with the mean of the preceding
  content tokens, so an object's rows depend on what came before it
- every EOS row derives from a hash of the whole content sequence, so padded
  EOS rows carry the full prompt's semantics

Encoding a prompt on its own therefore keeps its rows free of other objects,
while the same object inside a joined prompt picks them up.
"""

import numpy as np

from ..core.constants import BOS_TOKEN_ID, EOS_TOKEN_ID, PROMPT_LENGTH
from ..core.errors import PromptOverflowError
from ..core.hashing import derive_seed, stable_hash
from ..prompts.ore import EmbeddingMatrix
from ..prompts.tokens import mock_token_ids

# Weight of the causal context in content rows and of position in EOS rows
CONTEXT_WEIGHT = 0.5
POSITION_WEIGHT = 0.1


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


class MockEncoder:
    """Hash-of-token encoder with fixed (L, d) output."""

    thread_safe = True

    def __init__(self, length: int = PROMPT_LENGTH, width: int = 32, seed: int = 0):
        self.length = length
        self.width = width
        self.seed = seed
        self._vectors: dict[tuple[str, int], np.ndarray] = {}

    def _vector(self, kind: str, key: int) -> np.ndarray:
        cache_key = (kind, key)
        vec = self._vectors.get(cache_key)
        if vec is None:
            rng = np.random.default_rng(derive_seed(self.seed, "mock-encoder", kind, key))
            vec = rng.standard_normal(self.width)
            vec.flags.writeable = False
            self._vectors[cache_key] = vec
        return vec

    def tokenize(self, text: str) -> list[int]:
        return mock_token_ids(text)

    def encode(self, text: str) -> EmbeddingMatrix:
        ids = self.tokenize(text)
        if len(ids) > self.length - 2:
            raise PromptOverflowError(
                f"'{text}' has {len(ids)} tokens, limit is {self.length - 2}"
            )

        rows = np.empty((self.length, self.width), dtype=np.float64)
        rows[0] = _unit(self._vector("bos", BOS_TOKEN_ID))

        running = np.zeros(self.width)
        for j, tid in enumerate(ids):
            v = self._vector("token", tid)
            mixed = v if j == 0 else v + CONTEXT_WEIGHT * (running / j)
            rows[1 + j] = _unit(mixed)
            running = running + v

        eos_core = self._vector("eos", stable_hash(*ids))
        for p in range(len(ids) + 1, self.length):
            rows[p] = _unit(eos_core + POSITION_WEIGHT * self._vector("position", p))

        token_ids = [BOS_TOKEN_ID] + ids + [EOS_TOKEN_ID] * (self.length - len(ids) - 1)
        return EmbeddingMatrix(rows, tuple(token_ids), len(ids) + 2)

    def describe(self) -> dict:
        return {"kind": "mock", "length": self.length, "width": self.width, "seed": self.seed}
