"""Ticket-level relevance scoring for an entity map.

Each entity (section, value) contributes the cosine between the value
embedding and that section's node per ticket; contributions sum across
entities. Chunked nodes score as their best chunk by default; a "sum"
aggregation adds every chunk instead, for comparison against the literal
all-nodes formulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .embedding import Embedder
from .errors import ConfigurationError, ValidationError
from .index import VectorIndex, section_scores
from .model import KnowledgeGraph

CHUNK_AGG_MAX = "max"
CHUNK_AGG_SUM = "sum"


@dataclass(frozen=True)
class TicketScore:
    """One ticket's relevance: total plus the per-entity breakdown."""

    ticket_id: str
    score: float
    per_entity: dict[str, float] = field(default_factory=dict)


def score_tickets(
    entities: dict[str, str],
    index: VectorIndex,
    graph: KnowledgeGraph,
    embedder: Embedder,
    k_ticket: int = 3,
    chunk_agg: str = CHUNK_AGG_MAX,
) -> list[TicketScore]:
    """Rank tickets for an entity map; top k_ticket, ties by ticket id.

    A section with no indexed nodes contributes zero, never an error.
    Scores are clamped at zero per entity so the total is non-negative.
    """
    if not entities:
        raise ValidationError("entity map must be non-empty")
    if k_ticket < 1:
        raise ValidationError(f"k_ticket must be >= 1, got {k_ticket}")
    if chunk_agg not in (CHUNK_AGG_MAX, CHUNK_AGG_SUM):
        raise ConfigurationError(f"unknown chunk aggregation {chunk_agg!r}")
    if embedder.fingerprint != index.embedder_fingerprint:
        raise ConfigurationError(
            f"embedder fingerprint {embedder.fingerprint!r} does not match "
            f"index {index.embedder_fingerprint!r}"
        )

    contributions: dict[str, dict[str, float]] = {
        tid: {} for tid in graph.trees
    }
    for section in sorted(entities):
        value = entities[section]
        query_vec = embedder.embed(value)
        per_ticket: dict[str, float] = {}
        for key, score in section_scores(index, section, query_vec):
            tid = key[0]
            if chunk_agg == CHUNK_AGG_SUM:
                per_ticket[tid] = per_ticket.get(tid, 0.0) + score
            else:
                current = per_ticket.get(tid)
                if current is None or score > current:
                    per_ticket[tid] = score
        for tid in contributions:
            contributions[tid][section] = max(0.0, per_ticket.get(tid, 0.0))

    scores = [
        TicketScore(
            ticket_id=tid,
            score=sum(per_entity.values()),
            per_entity=per_entity,
        )
        for tid, per_entity in contributions.items()
    ]
    scores.sort(key=lambda s: (-s.score, s.ticket_id))
    return scores[:k_ticket]
