"""Vector index over section-node chunks: exact cosine top-k per section,
plus a compact binary on-disk format.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embedding import (
    Chunk,
    DEFAULT_CHUNK_OVERLAP,
    DEFAULT_CHUNK_TOKENS,
    Embedder,
    chunk_text,
)
from .errors import ConfigurationError, SnapshotError
from .model import KnowledgeGraph

# key = (ticket_id, section_name, chunk_index)
EntryKey = tuple[str, str, int]

_MAGIC = b"TGVI"
_FORMAT_VERSION = 1
_UNIT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class VectorEntry:
    key: EntryKey
    vector: np.ndarray
    text_len: int


@dataclass
class VectorIndex:
    """Immutable-after-build store of unit vectors grouped by section."""

    dimension: int
    embedder_fingerprint: str
    entries: list[VectorEntry] = field(default_factory=list)
    by_section: dict[str, list[int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def sections(self) -> list[str]:
        return sorted(self.by_section)


def _check_unit(vector: np.ndarray, key: EntryKey) -> None:
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > _UNIT_TOLERANCE:
        raise ConfigurationError(f"entry {key} has norm {norm}, expected unit vector")


def build_index(
    graph: KnowledgeGraph,
    embedder: Embedder,
    max_chunk_tokens: int = DEFAULT_CHUNK_TOKENS,
    chunk_overlap: int = DEFAULT_CHUNK_OVERLAP,
) -> VectorIndex:
    """Embed every chunk of every embeddable section node in the graph.

    Entries are ordered by key so identical graphs index identically.
    """
    embeddable = set(graph.template.embeddable_sections())
    entries: list[VectorEntry] = []
    for tid in sorted(graph.trees):
        tree = graph.trees[tid]
        for section in sorted(tree.nodes):
            if section not in embeddable:
                continue
            text = tree.nodes[section].text
            for idx, chunk in enumerate(chunk_text(text, max_chunk_tokens, chunk_overlap)):
                key = (tid, section, idx)
                vector = np.asarray(embedder.embed(chunk.text), dtype=np.float64)
                _check_unit(vector, key)
                entries.append(VectorEntry(key=key, vector=vector, text_len=len(chunk.text)))

    index = VectorIndex(dimension=embedder.dimension, embedder_fingerprint=embedder.fingerprint)
    for i, entry in enumerate(entries):
        index.entries.append(entry)
        index.by_section.setdefault(entry.key[1], []).append(i)
    return index


def search(
    index: VectorIndex,
    section: str,
    query_vec: np.ndarray,
    k: int,
) -> list[tuple[EntryKey, float]]:
    """Exact top-k by cosine over the section's entries, descending.

    Ties break by ascending key. Unknown/empty sections return [] rather
    than erroring; a query vector of the wrong dimension is a
    configuration error.
    """
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    query = np.asarray(query_vec, dtype=np.float64)
    if query.shape != (index.dimension,):
        raise ConfigurationError(
            f"query vector has shape {query.shape}, index dimension is {index.dimension}"
        )
    keyed = section_scores(index, section, query)
    keyed.sort(key=lambda pair: (-pair[1], pair[0]))
    return keyed[:k]


def section_scores(index: VectorIndex, section: str, query_vec: np.ndarray) -> list[tuple[EntryKey, float]]:
    """Cosine of the query against every entry of a section (unranked order).

    Scored entry by entry with the same scalar dot product a by-hand
    recomputation would use; a stacked matrix product can round two
    mathematically tied rows differently, which would make id tie-breaks
    depend on BLAS internals.
    """
    positions = index.by_section.get(section)
    if not positions:
        return []
    query = np.asarray(query_vec, dtype=np.float64)
    if query.shape != (index.dimension,):
        raise ConfigurationError(
            f"query vector has shape {query.shape}, index dimension is {index.dimension}"
        )
    return [
        (index.entries[pos].key, float(np.dot(index.entries[pos].vector, query)))
        for pos in positions
    ]


def save_index(index: VectorIndex, path: Path) -> None:
    """Binary layout: magic, version byte, JSON header, float64-LE vector
    block, JSON key table. Deterministic for identical content.
    """
    header = json.dumps(
        {
            "dimension": index.dimension,
            "fingerprint": index.embedder_fingerprint,
            "count": len(index.entries),
        },
        sort_keys=True,
    ).encode("utf-8")
    table = json.dumps(
        [[e.key[0], e.key[1], e.key[2], e.text_len] for e in index.entries],
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<B", _FORMAT_VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for entry in index.entries:
            fh.write(entry.vector.astype("<f8").tobytes())
        fh.write(struct.pack("<I", len(table)))
        fh.write(table)


def load_index(path: Path) -> VectorIndex:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise SnapshotError(f"{path}: not a vector index file")
    version = data[4]
    if version != _FORMAT_VERSION:
        raise SnapshotError(f"{path}: unsupported index format version {version}")
    header_len = struct.unpack_from("<I", data, 5)[0]
    offset = 9
    header = json.loads(data[offset:offset + header_len])
    offset += header_len
    dimension = int(header["dimension"])
    count = int(header["count"])
    block = count * dimension * 8
    vectors = np.frombuffer(data[offset:offset + block], dtype="<f8").reshape(count, dimension)
    offset += block
    table_len = struct.unpack_from("<I", data, offset)[0]
    offset += 4
    table = json.loads(data[offset:offset + table_len])
    if len(table) != count:
        raise SnapshotError(f"{path}: key table length {len(table)} != count {count}")

    index = VectorIndex(dimension=dimension, embedder_fingerprint=header["fingerprint"])
    for i, (tid, section, chunk_idx, text_len) in enumerate(table):
        entry = VectorEntry(key=(tid, section, int(chunk_idx)), vector=vectors[i].copy(), text_len=int(text_len))
        index.entries.append(entry)
        index.by_section.setdefault(section, []).append(i)
    return index
