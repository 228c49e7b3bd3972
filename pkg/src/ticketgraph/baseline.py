"""Flat chunk retrieval over whole tickets, used as control and fallback.

Each ticket is flattened to "title + body", chunked, and embedded; a
query ranks tickets by their best-scoring chunk. No structure, no graph.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .embedding import Chunk, DEFAULT_CHUNK_OVERLAP, DEFAULT_CHUNK_TOKENS, Embedder, chunk_text
from .errors import ConfigurationError, SnapshotError
from .parsing import RawTicket

_MAGIC = b"TGBL"
_VERSION = 1


@dataclass(frozen=True)
class BaselineChunk:
    ticket_id: str
    chunk_index: int
    text: str


@dataclass
class BaselineIndex:
    dimension: int
    embedder_fingerprint: str
    max_chunk_tokens: int
    chunk_overlap: int
    chunks: list[BaselineChunk]
    matrix: np.ndarray  # one row per chunk, unit-norm float64


@dataclass(frozen=True)
class BaselineHit:
    """One ranked ticket: its best chunk and that chunk's score."""

    ticket_id: str
    score: float
    chunk_index: int
    chunk_text: str


def flatten_ticket(ticket: RawTicket) -> str:
    parts = [p for p in (ticket.title, ticket.body) if p]
    return "\n\n".join(parts)


def build_baseline(
    tickets: list[RawTicket],
    embedder: Embedder,
    max_chunk_tokens: int = DEFAULT_CHUNK_TOKENS,
    chunk_overlap: int = DEFAULT_CHUNK_OVERLAP,
) -> BaselineIndex:
    chunks: list[BaselineChunk] = []
    vectors: list[np.ndarray] = []
    for ticket in sorted(tickets, key=lambda t: t.ticket_id):
        flat = flatten_ticket(ticket)
        pieces: list[Chunk] = chunk_text(flat, max_chunk_tokens, chunk_overlap)
        for i, piece in enumerate(pieces):
            chunks.append(
                BaselineChunk(ticket_id=ticket.ticket_id, chunk_index=i, text=piece.text)
            )
            vectors.append(embedder.embed(piece.text))
    matrix = (
        np.stack(vectors) if vectors else np.zeros((0, embedder.dimension))
    )
    return BaselineIndex(
        dimension=embedder.dimension,
        embedder_fingerprint=embedder.fingerprint,
        max_chunk_tokens=max_chunk_tokens,
        chunk_overlap=chunk_overlap,
        chunks=chunks,
        matrix=matrix,
    )


def retrieve_baseline(
    baseline: BaselineIndex,
    query: str,
    embedder: Embedder,
    k: int = 10,
) -> list[BaselineHit]:
    """Rank tickets by best chunk cosine; ties break by ticket id.

    The embedder must match the one the index was built with.
    """
    if embedder.fingerprint != baseline.embedder_fingerprint:
        raise ConfigurationError(
            f"embedder fingerprint {embedder.fingerprint!r} does not match "
            f"baseline index {baseline.embedder_fingerprint!r}"
        )
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    if not baseline.chunks:
        return []
    query_vec = embedder.embed(query)
    scores = baseline.matrix @ query_vec
    best: dict[str, tuple[float, int, str]] = {}
    for chunk, score in zip(baseline.chunks, scores):
        score = float(score)
        current = best.get(chunk.ticket_id)
        if current is None or score > current[0]:
            best[chunk.ticket_id] = (score, chunk.chunk_index, chunk.text)
    ranked = sorted(best.items(), key=lambda item: (-item[1][0], item[0]))
    return [
        BaselineHit(ticket_id=tid, score=score, chunk_index=idx, chunk_text=text)
        for tid, (score, idx, text) in ranked[:k]
    ]


def save_baseline(baseline: BaselineIndex, path: Path) -> None:
    """Write the baseline index: JSON header + raw float64 rows."""
    header = {
        "dimension": baseline.dimension,
        "embedder_fingerprint": baseline.embedder_fingerprint,
        "max_chunk_tokens": baseline.max_chunk_tokens,
        "chunk_overlap": baseline.chunk_overlap,
        "chunks": [
            {"ticket_id": c.ticket_id, "chunk_index": c.chunk_index, "text": c.text}
            for c in baseline.chunks
        ],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<B", _VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(
            np.ascontiguousarray(baseline.matrix, dtype="<f8").tobytes()
        )


def load_baseline(path: Path) -> BaselineIndex:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read baseline index {path}: {exc}") from exc
    if raw[:4] != _MAGIC:
        raise SnapshotError(f"{path}: not a baseline index file")
    if raw[4] != _VERSION:
        raise SnapshotError(f"{path}: unsupported baseline version {raw[4]}")
    (header_len,) = struct.unpack_from("<I", raw, 5)
    header_end = 9 + header_len
    try:
        header = json.loads(raw[9:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SnapshotError(f"{path}: corrupt baseline header: {exc}") from exc
    chunks = [
        BaselineChunk(
            ticket_id=c["ticket_id"], chunk_index=c["chunk_index"], text=c["text"]
        )
        for c in header["chunks"]
    ]
    dimension = header["dimension"]
    expected = len(chunks) * dimension * 8
    body = raw[header_end:]
    if len(body) != expected:
        raise SnapshotError(
            f"{path}: vector payload is {len(body)} bytes, expected {expected}"
        )
    matrix = np.frombuffer(body, dtype="<f8").reshape(len(chunks), dimension).copy()
    return BaselineIndex(
        dimension=dimension,
        embedder_fingerprint=header["embedder_fingerprint"],
        max_chunk_tokens=header["max_chunk_tokens"],
        chunk_overlap=header["chunk_overlap"],
        chunks=chunks,
        matrix=matrix,
    )
