"""
Object-level prompt pairs and base prompt construction.

A multi-object edit is a list of (source, target) prompt pairs, one per object.
The base prompt of a side joins that side's prompts with " and "; each object's
tokens occupy a span of rows in the base prompt's embedding matrix.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from ..core.constants import CONNECTIVE, PROMPT_LENGTH
from ..core.errors import EmptyRequest, PromptOverflowError, RequestError
from .tokens import mock_token_ids

SIDES = ("source", "target")

Tokenizer = Callable[[str], list[int]]


@dataclass(frozen=True)
class ObjectPromptPair:
    """One object's source and target prompt; index is 1-based."""
    source_text: str
    target_text: str
    index: int
    phrase: Optional[str] = None  # segmentation phrase, defaults to source_text

    @property
    def segment_phrase(self) -> str:
        return self.phrase if self.phrase else self.source_text

    def text(self, side: str) -> str:
        if side == "source":
            return self.source_text
        if side == "target":
            return self.target_text
        raise RequestError(f"side must be 'source' or 'target', got '{side}'")

    def to_dict(self) -> dict:
        d = {"index": self.index, "source": self.source_text, "target": self.target_text}
        if self.phrase:
            d["phrase"] = self.phrase
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ObjectPromptPair":
        return cls(
            source_text=data.get("source", ""),
            target_text=data.get("target", ""),
            index=int(data.get("index", 0)),
            phrase=data.get("phrase"),
        )


def make_pairs(texts: Sequence[tuple[str, str]]) -> list[ObjectPromptPair]:
    """Build indexed pairs from (source, target) tuples in order."""
    return [ObjectPromptPair(src, tgt, i + 1) for i, (src, tgt) in enumerate(texts)]


def validate_pairs(pairs: Sequence[ObjectPromptPair]):
    """Raise EmptyRequest / RequestError unless pairs are non-empty and indexed 1..K."""
    if not pairs:
        raise EmptyRequest("An edit needs at least one object prompt pair")
    for pair in pairs:
        if not pair.source_text.strip() or not pair.target_text.strip():
            raise RequestError(f"Object {pair.index}: source and target prompts must be non-empty")
    indices = [p.index for p in pairs]
    if indices != list(range(1, len(pairs) + 1)):
        raise RequestError(f"Object indices must be 1..{len(pairs)} in order, got {indices}")


def side_texts(pairs: Sequence[ObjectPromptPair], side: str) -> list[str]:
    return [p.text(side).strip() for p in pairs]


def _find_subsequence(haystack: list[int], needle: list[int], start: int) -> Optional[int]:
    n = len(needle)
    if n == 0:
        return None
    for i in range(start, len(haystack) - n + 1):
        if haystack[i:i + n] == needle:
            return i
    return None


def locate_spans(
    texts: Sequence[str],
    base_ids: list[int],
    tokenizer: Tokenizer,
) -> list[tuple[int, int]]:
    """
    Find each object's half-open row range inside the tokenized base prompt.

    Rows count from the BOS row, so spans start at 1 or later. Each object's
    isolated token ids are searched for after the previous span; when a
    tokenizer merge hides them, the span falls back to cumulative offsets.
    """
    connective_len = len(tokenizer(CONNECTIVE.strip()))
    spans = []
    cursor = 0
    offset = 0
    for i, text in enumerate(texts):
        ids = tokenizer(text)
        found = _find_subsequence(base_ids, ids, cursor)
        start = found if found is not None else max(offset, cursor)
        end = min(start + len(ids), len(base_ids))
        spans.append((start + 1, end + 1))
        cursor = end
        offset += len(ids) + connective_len
    return spans


def build_base_prompt(
    pairs: Sequence[ObjectPromptPair],
    side: str,
    tokenizer: Optional[Tokenizer] = None,
    max_tokens: int = PROMPT_LENGTH - 2,
) -> tuple[str, list[tuple[int, int]]]:
    """
    Join one side's object prompts into the base prompt.

    Args:
        pairs: Object prompt pairs in index order
        side: "source" or "target"
        tokenizer: Text -> content token ids (defaults to the mock tokenizer)
        max_tokens: Content tokens that fit between BOS and EOS

    Returns:
        (base_prompt, spans) with one half-open row range per object

    Raises:
        EmptyRequest: no pairs
        PromptOverflowError: the joined prompt exceeds max_tokens
    """
    if not pairs:
        raise EmptyRequest("An edit needs at least one object prompt pair")
    tokenizer = tokenizer or mock_token_ids

    texts = side_texts(pairs, side)
    base_prompt = CONNECTIVE.join(texts)
    base_ids = tokenizer(base_prompt)
    if len(base_ids) > max_tokens:
        raise PromptOverflowError(
            f"{side} base prompt has {len(base_ids)} tokens, limit is {max_tokens}: '{base_prompt}'"
        )
    return base_prompt, locate_spans(texts, base_ids, tokenizer)
