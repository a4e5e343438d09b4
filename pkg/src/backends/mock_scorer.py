"""
Deterministic mock image-text similarity.

Image features are the mean (centered) and standard deviation of RGB over
the nonzero pixels of a region. Text features sum per-word vectors: colour
words map to their RGB value, other words to hashed pseudo-random vectors.
Score = 50 · (1 + cosine), so it lies in [0, 100].
"""

import numpy as np

from ..core.hashing import derive_seed
from ..prompts.tokens import tokenize_words

# Score of a region with no nonzero pixel
FLOOR_SCORE = 0.0

# Score when the text has no informative word
NEUTRAL_SCORE = 50.0

STOPWORDS = frozenset({"a", "an", "the", "of", "and", "made", "colored", "-", ",", "."})

PALETTE = {
    "red": (1.0, 0.0, 0.0),
    "green": (0.0, 0.6, 0.0),
    "blue": (0.0, 0.0, 1.0),
    "yellow": (1.0, 1.0, 0.0),
    "orange": (1.0, 0.55, 0.0),
    "purple": (0.5, 0.0, 0.5),
    "pink": (1.0, 0.75, 0.8),
    "brown": (0.55, 0.27, 0.07),
    "black": (0.05, 0.05, 0.05),
    "white": (1.0, 1.0, 1.0),
    "gray": (0.5, 0.5, 0.5),
    "grey": (0.5, 0.5, 0.5),
    "cyan": (0.0, 1.0, 1.0),
    "gold": (1.0, 0.84, 0.0),
    "silver": (0.75, 0.75, 0.75),
}


class MockScorer:
    """Stateless apart from a word-vector cache; safe to share across threads."""

    FEATURE_WIDTH = 6

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._word_vectors: dict[str, np.ndarray] = {}

    def image_features(self, image: np.ndarray) -> np.ndarray | None:
        """[mean RGB - 0.5, std RGB] over nonzero pixels; None for an all-zero region."""
        pixels = np.asarray(image, dtype=np.float64).reshape(-1, 3)
        pixels = pixels[np.any(pixels != 0.0, axis=1)]
        if len(pixels) == 0:
            return None
        return np.concatenate([pixels.mean(axis=0) - 0.5, pixels.std(axis=0)])

    def _word_vector(self, word: str) -> np.ndarray:
        vec = self._word_vectors.get(word)
        if vec is None:
            if word in PALETTE:
                vec = np.concatenate([np.asarray(PALETTE[word]) - 0.5, np.zeros(3)])
            else:
                rng = np.random.default_rng(derive_seed(self.seed, "mock-scorer", word))
                vec = rng.standard_normal(self.FEATURE_WIDTH) * 0.25
            self._word_vectors[word] = vec
        return vec

    def text_features(self, text: str) -> np.ndarray:
        vec = np.zeros(self.FEATURE_WIDTH)
        for word in tokenize_words(text):
            if word not in STOPWORDS:
                vec = vec + self._word_vector(word)
        return vec

    def score(self, image: np.ndarray, text: str) -> float:
        img = self.image_features(image)
        if img is None:
            return FLOOR_SCORE
        txt = self.text_features(text)
        denom = np.linalg.norm(img) * np.linalg.norm(txt)
        if denom == 0.0:
            return NEUTRAL_SCORE
        cosine = float(np.dot(img, txt) / denom)
        return float(np.clip(50.0 * (1.0 + cosine), 0.0, 100.0))

    def describe(self) -> dict:
        return {"kind": "mock", "seed": self.seed}
