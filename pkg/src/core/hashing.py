"""
Stable hashing helpers.

Python's hash() is salted per process; everything that feeds a seed or an
identifier goes through BLAKE2 / SHA-256 instead.
"""

import hashlib
import json

import numpy as np


def stable_hash(*parts) -> int:
    """64-bit unsigned hash of the string forms of parts."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def derive_seed(seed: int, *parts) -> int:
    """Derive a child seed (fits numpy's SeedSequence) from a seed and labels."""
    return stable_hash(seed, *parts) & 0x7FFF_FFFF_FFFF_FFFF


def canonical_json(data) -> str:
    """JSON with sorted keys and no incidental whitespace."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def sha256_hex(data) -> str:
    """SHA-256 of the canonical JSON of data."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def hash_uniforms(seed: int, label: str, count: int) -> np.ndarray:
    """
    count values in [-1, 1) from SHA-256 of "<seed>:<label>:<i>".

    Each value is k / 2**52 - 1 for the top 53 bits k of the digest's first
    8 little-endian bytes, so every platform produces the same doubles.
    """
    values = np.empty(count, dtype=np.float64)
    for i in range(count):
        digest = hashlib.sha256(f"{seed}:{label}:{i}".encode("utf-8")).digest()
        k = int.from_bytes(digest[:8], "little") >> 11
        values[i] = k / 4503599627370496.0 - 1.0
    return values
