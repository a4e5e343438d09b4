"""
Object-restricted embeddings (ORE).

Each object prompt is encoded in isolation, so its EOS rows carry only that
object's semantics. The base embedding of the joined prompt then gets its
object token spans replaced by the isolated token rows. The remaining EOS
strategies are ablations that only touch the padded-EOS rows of the base.
"""

from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np

from ..core.constants import CONNECTIVE, EOS_STRATEGIES
from ..core.errors import EncoderShapeError, MissingStrippedPrompt, RequestError
from .pairs import ObjectPromptPair, build_base_prompt, side_texts, validate_pairs


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """
    Padded prompt embedding.

    rows: L×d array; row 0 is BOS, rows >= content_len are padded EOS
    token_ids: L token ids
    content_len: BOS + content tokens + first EOS
    """
    rows: np.ndarray
    token_ids: tuple[int, ...]
    content_len: int

    def __post_init__(self):
        rows = np.array(self.rows, copy=True)
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "token_ids", tuple(int(t) for t in self.token_ids))

    @property
    def length(self) -> int:
        return self.rows.shape[0]

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    @property
    def num_tokens(self) -> int:
        """Content tokens between BOS and the first EOS."""
        return self.content_len - 2

    def with_rows(self, rows: np.ndarray) -> "EmbeddingMatrix":
        return EmbeddingMatrix(rows, self.token_ids, self.content_len)


class TextEncoder(Protocol):
    """
    Encoder adapter contract.

    length/width: fixed L and d of every encoding
    thread_safe: False makes the pipeline serialize encode() calls
    """
    length: int
    width: int
    thread_safe: bool

    def tokenize(self, text: str) -> list[int]:
        """Content token ids (no BOS/EOS)."""
        ...

    def encode(self, text: str) -> EmbeddingMatrix:
        ...


@dataclass(frozen=True, eq=False)
class OreSet:
    """Per-object isolated encodings plus the base embedding built from them."""
    per_object: tuple[EmbeddingMatrix, ...]
    base: EmbeddingMatrix
    base_plain: EmbeddingMatrix
    spans: tuple[tuple[int, int], ...]
    eos_strategy: str
    base_prompt: str
    object_prompts: tuple[str, ...]

    @property
    def num_objects(self) -> int:
        return len(self.per_object)


def _encode_checked(encoder: TextEncoder, text: str) -> EmbeddingMatrix:
    matrix = encoder.encode(text)
    expected = (encoder.length, encoder.width)
    if matrix.rows.shape != expected:
        raise EncoderShapeError(
            f"Encoder returned {matrix.rows.shape} for '{text}', expected {expected}"
        )
    return matrix


def splice_spans(
    base_plain: EmbeddingMatrix,
    per_object: Sequence[EmbeddingMatrix],
    spans: Sequence[tuple[int, int]],
) -> np.ndarray:
    """Base rows with each span replaced by its object's isolated token rows."""
    rows = base_plain.rows.copy()
    for (start, end), matrix in zip(spans, per_object):
        n = min(end - start, matrix.num_tokens)
        rows[start:start + n] = matrix.rows[1:1 + n]
    return rows


def encode_object_restricted(
    pairs: Sequence[ObjectPromptPair],
    side: str,
    encoder: TextEncoder,
    eos_strategy: str = "ore",
    stripped_prompts: Optional[Sequence[str]] = None,
) -> OreSet:
    """
    Encode one side of a request with object-restricted embeddings.

    Args:
        pairs: Object prompt pairs in index order
        side: "source" or "target"
        encoder: TextEncoder adapter
        eos_strategy: ore | naive | zeros | bos | empty | ets
        stripped_prompts: Attribute-free prompt per object (required for ets)

    Returns:
        OreSet with isolated per-object encodings, the plain base encoding
        (used for attention keys) and the strategy-specific base (used for values)
    """
    if eos_strategy not in EOS_STRATEGIES:
        raise RequestError(f"Unknown EOS strategy '{eos_strategy}'")
    validate_pairs(pairs)
    if eos_strategy == "ets":
        if not stripped_prompts or len(stripped_prompts) != len(pairs):
            raise MissingStrippedPrompt(
                f"Strategy 'ets' needs one stripped prompt per object ({len(pairs)} expected)"
            )

    base_prompt, spans = build_base_prompt(
        pairs, side, tokenizer=encoder.tokenize, max_tokens=encoder.length - 2,
    )
    texts = side_texts(pairs, side)
    per_object = tuple(_encode_checked(encoder, text) for text in texts)
    base_plain = _encode_checked(encoder, base_prompt)

    tail = slice(base_plain.content_len, None)
    if eos_strategy == "ore":
        rows = splice_spans(base_plain, per_object, spans)
    elif eos_strategy == "naive":
        rows = base_plain.rows.copy()
    elif eos_strategy == "zeros":
        rows = base_plain.rows.copy()
        rows[tail] = 0.0
    elif eos_strategy == "bos":
        rows = base_plain.rows.copy()
        rows[tail] = base_plain.rows[0]
    elif eos_strategy == "empty":
        rows = base_plain.rows.copy()
        rows[tail] = _encode_checked(encoder, "").rows[tail]
    else:  # ets
        stripped_base = CONNECTIVE.join(s.strip() for s in stripped_prompts)
        rows = base_plain.rows.copy()
        rows[tail] = _encode_checked(encoder, stripped_base).rows[tail]

    return OreSet(
        per_object=per_object,
        base=base_plain.with_rows(rows),
        base_plain=base_plain,
        spans=tuple(spans),
        eos_strategy=eos_strategy,
        base_prompt=base_prompt,
        object_prompts=tuple(texts),
    )
