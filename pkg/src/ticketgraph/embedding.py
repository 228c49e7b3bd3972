"""Text embedding contract, the built-in deterministic hash embedder, and
section-safe chunking of long node texts.
"""

from __future__ import annotations

import re
import zlib
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import ValidationError

_TOKEN = re.compile(r"[a-z0-9]+")
_SPAN = re.compile(r"\S+")

MIN_HASH_DIMENSION = 64
DEFAULT_DIMENSION = 512
DEFAULT_CHUNK_TOKENS = 256
DEFAULT_CHUNK_OVERLAP = 32


@runtime_checkable
class Embedder(Protocol):
    """Deterministic text-to-unit-vector adapter.

    Implementations must return a vector of exactly `dimension` finite
    components and must be safe to call concurrently. `fingerprint`
    identifies the model so indexes and graphs can be checked for
    compatibility.
    """

    dimension: int
    fingerprint: str

    def embed(self, text: str) -> np.ndarray: ...


def hash_embed(text: str, dimension: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Deterministic bag-of-tokens embedding.

    Lowercased alphanumeric tokens are hashed (crc32) into `dimension`
    buckets; bucket counts are L2-normalized. Text with no tokens maps to
    the first canonical basis vector so the result is always unit norm.
    """
    if dimension < MIN_HASH_DIMENSION:
        raise ValidationError(
            f"hash embedding dimension must be >= {MIN_HASH_DIMENSION}, got {dimension}"
        )
    vec = np.zeros(dimension, dtype=np.float64)
    for token in _TOKEN.findall(text.lower()):
        vec[zlib.crc32(token.encode("utf-8")) % dimension] += 1.0
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec[0] = 1.0
        return vec
    return vec / norm


def hash_bucket(token: str, dimension: int = DEFAULT_DIMENSION) -> int:
    """Bucket index `hash_embed` assigns to a single token."""
    return zlib.crc32(token.lower().encode("utf-8")) % dimension


class HashEmbedder:
    """The built-in stub Embedder backed by `hash_embed`."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < MIN_HASH_DIMENSION:
            raise ValidationError(
                f"hash embedding dimension must be >= {MIN_HASH_DIMENSION}, got {dimension}"
            )
        self.dimension = dimension
        self.fingerprint = f"hash-crc32-v1-d{dimension}"

    def embed(self, text: str) -> np.ndarray:
        return hash_embed(text, self.dimension)

    def embed_many(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension), dtype=np.float64)
        return np.stack([self.embed(t) for t in texts])


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two vectors (unit vectors make this a dot)."""
    denom = float(np.linalg.norm(a)) * float(np.linalg.norm(b))
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)


@dataclass(frozen=True)
class Chunk:
    """One token window of a longer text.

    text includes `prefix_chars` characters repeated from the previous
    chunk (the token overlap); `tail` is the non-overlapping remainder, and
    concatenating tails of consecutive chunks reproduces the original text
    exactly.
    """

    text: str
    start_token: int
    end_token: int
    prefix_chars: int = 0

    @property
    def tail(self) -> str:
        return self.text[self.prefix_chars:]

    @property
    def token_count(self) -> int:
        return self.end_token - self.start_token


def chunk_text(text: str, max_units: int = DEFAULT_CHUNK_TOKENS,
               overlap: int = DEFAULT_CHUNK_OVERLAP) -> list[Chunk]:
    """Split `text` into windows of at most `max_units` whitespace tokens.

    Consecutive chunks share `overlap` tokens. Character slicing keeps all
    original whitespace, so `reassemble(chunks) == text` for any input.
    Empty text yields no chunks; whitespace-only text yields one chunk.
    """
    if max_units <= overlap or overlap < 0:
        raise ValidationError(
            f"chunking requires max_units > overlap >= 0, got {max_units}/{overlap}"
        )
    if text == "":
        return []
    spans = [m.span() for m in _SPAN.finditer(text)]
    n = len(spans)
    if n == 0:
        return [Chunk(text=text, start_token=0, end_token=0)]

    stride = max_units - overlap
    starts = list(range(0, n, stride))
    # Drop a trailing window that would only repeat already-seen tokens.
    while len(starts) > 1 and starts[-1] + overlap >= n:
        starts.pop()

    chunks: list[Chunk] = []
    for j, tok_start in enumerate(starts):
        tok_end = min(tok_start + max_units, n)
        is_last = j == len(starts) - 1
        # Character range of the fresh (non-overlap) part. The fresh part of
        # chunk j runs up to the start of chunk j+1's fresh part, so tails
        # tile the whole string.
        fresh_tok = tok_start + (overlap if j > 0 else 0)
        char_start = 0 if j == 0 else spans[tok_start][0]
        fresh_start = char_start if j == 0 else spans[fresh_tok][0]
        if is_last:
            char_end = len(text)
        else:
            next_fresh_tok = starts[j + 1] + overlap
            char_end = spans[next_fresh_tok][0]
        chunks.append(
            Chunk(
                text=text[char_start:char_end],
                start_token=tok_start,
                end_token=tok_end,
                prefix_chars=fresh_start - char_start,
            )
        )
    return chunks


def reassemble(chunks: list[Chunk]) -> str:
    """Inverse of `chunk_text`: concatenation with overlaps removed."""
    return "".join(c.tail for c in chunks)
