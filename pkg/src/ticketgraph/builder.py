"""Corpus-level graph assembly: parse every ticket, connect the trees.

Explicit edges come from tracker link fields; implicit edges connect
tickets whose title embeddings are similar enough. Both live at ticket
granularity, on top of the per-ticket section trees.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .embedding import Embedder, HashEmbedder
from .errors import ValidationError
from .index import VectorIndex, build_index
from .model import (
    EDGE_EXPLICIT,
    EDGE_IMPLICIT,
    IMPLICIT_RELATION,
    InterTicketEdge,
    KnowledgeGraph,
    TicketTree,
    validate_graph,
)
from .parsing import ParseOutcome, RawTicket, parse_ticket
from .template import GraphTemplate, default_template

logger = logging.getLogger(__name__)

DEFAULT_THETA = 0.75


@dataclass
class BuildReport:
    """What happened during a build, for logs and the snapshot manifest."""

    ticket_count: int = 0
    explicit_edge_count: int = 0
    implicit_edge_count: int = 0
    warnings: list[str] = field(default_factory=list)


def build_explicit_edges(
    tickets: list[RawTicket], known_ids: set[str]
) -> tuple[list[InterTicketEdge], list[str]]:
    """Turn tracker link fields into directed explicit edges.

    Links pointing outside the corpus are skipped with a warning, never
    an error. Duplicate (src, dst, relation) triples collapse to one edge.
    """
    warnings: list[str] = []
    seen: set[tuple[str, str, str]] = set()
    edges: list[InterTicketEdge] = []
    for ticket in tickets:
        for relation, targets in sorted(ticket.link_fields.items()):
            for target in targets:
                if target == ticket.ticket_id:
                    warnings.append(
                        f"{ticket.ticket_id}: self link {relation!r} skipped"
                    )
                    continue
                if target not in known_ids:
                    warnings.append(
                        f"{ticket.ticket_id}: link {relation!r} -> {target} "
                        "points outside the corpus; skipped"
                    )
                    continue
                key = (ticket.ticket_id, target, relation)
                if key in seen:
                    continue
                seen.add(key)
                edges.append(
                    InterTicketEdge(
                        src=ticket.ticket_id,
                        dst=target,
                        kind=EDGE_EXPLICIT,
                        relation=relation,
                    )
                )
    edges.sort(key=lambda e: e.sort_key())
    return edges, warnings


def title_vectors(
    tickets: list[RawTicket], embedder: Embedder
) -> tuple[list[str], np.ndarray]:
    """Embed each ticket's title, in ascending ticket-id order."""
    ordered = sorted(tickets, key=lambda t: t.ticket_id)
    ids = [t.ticket_id for t in ordered]
    if not ids:
        return ids, np.zeros((0, embedder.dimension))
    matrix = np.stack([embedder.embed(t.title) for t in ordered])
    return ids, matrix


def build_implicit_edges(
    tickets: list[RawTicket],
    embedder: Embedder,
    theta: float = DEFAULT_THETA,
    top_m: Optional[int] = None,
) -> list[InterTicketEdge]:
    """Connect ticket pairs whose title cosine is >= theta.

    Each qualifying unordered pair is stored as two mirrored directed
    edges with equal weight. `top_m`, when set, caps how many implicit
    partners a ticket keeps (its strongest, cosine descending, partner id
    ascending on ties); a pair survives only if both endpoints keep it.
    """
    if not -1.0 <= theta <= 1.0:
        raise ValidationError(f"theta must be within [-1, 1], got {theta}")
    if top_m is not None and top_m < 1:
        raise ValidationError(f"top_m must be >= 1, got {top_m}")
    ids, matrix = title_vectors(tickets, embedder)
    n = len(ids)
    pairs: list[tuple[str, str, float]] = []
    for i in range(n):
        for j in range(i + 1, n):
            weight = float(np.dot(matrix[i], matrix[j]))
            if weight >= theta:
                pairs.append((ids[i], ids[j], weight))

    if top_m is not None and pairs:
        partners: dict[str, list[tuple[float, str]]] = {tid: [] for tid in ids}
        for a, b, weight in pairs:
            partners[a].append((weight, b))
            partners[b].append((weight, a))
        kept: dict[str, set[str]] = {}
        for tid, cands in partners.items():
            cands.sort(key=lambda item: (-item[0], item[1]))
            kept[tid] = {other for _w, other in cands[:top_m]}
        pairs = [
            (a, b, w) for a, b, w in pairs if b in kept[a] and a in kept[b]
        ]

    edges: list[InterTicketEdge] = []
    for a, b, weight in pairs:
        edges.append(
            InterTicketEdge(
                src=a, dst=b, kind=EDGE_IMPLICIT,
                relation=IMPLICIT_RELATION, weight=weight,
            )
        )
        edges.append(
            InterTicketEdge(
                src=b, dst=a, kind=EDGE_IMPLICIT,
                relation=IMPLICIT_RELATION, weight=weight,
            )
        )
    edges.sort(key=lambda e: e.sort_key())
    return edges


def build_graph(
    tickets: list[RawTicket],
    template: Optional[GraphTemplate] = None,
    embedder: Optional[Embedder] = None,
    adapter=None,
    theta: float = DEFAULT_THETA,
    top_m: Optional[int] = None,
    max_chunk_tokens: int = 256,
    chunk_overlap: int = 32,
) -> tuple[KnowledgeGraph, VectorIndex, BuildReport]:
    """Parse a corpus and assemble the full graph plus its vector index.

    The result is validated; any structural finding is a hard error since
    the builder itself should never emit a broken graph.
    """
    template = template or default_template()
    embedder = embedder or HashEmbedder()
    report = BuildReport(ticket_count=len(tickets))

    seen_ids: set[str] = set()
    for ticket in tickets:
        if ticket.ticket_id in seen_ids:
            raise ValidationError(f"duplicate ticket_id {ticket.ticket_id!r}")
        seen_ids.add(ticket.ticket_id)

    trees: dict[str, TicketTree] = {}
    for ticket in sorted(tickets, key=lambda t: t.ticket_id):
        outcome: ParseOutcome = parse_ticket(ticket, template, adapter)
        trees[ticket.ticket_id] = outcome.tree
        report.warnings.extend(
            f"{ticket.ticket_id}: {w}" for w in outcome.warnings
        )

    explicit, link_warnings = build_explicit_edges(tickets, seen_ids)
    report.warnings.extend(link_warnings)
    implicit = build_implicit_edges(tickets, embedder, theta=theta, top_m=top_m)
    edges = sorted(explicit + implicit, key=lambda e: e.sort_key())
    report.explicit_edge_count = len(explicit)
    report.implicit_edge_count = len(implicit) // 2

    build_params = {
        "theta": theta,
        "top_m": top_m,
        "embedder_fingerprint": embedder.fingerprint,
        "max_chunk_tokens": max_chunk_tokens,
        "chunk_overlap": chunk_overlap,
    }
    graph = KnowledgeGraph(
        template=template, trees=trees, edges=edges, build_params=build_params
    )
    findings = validate_graph(graph)
    if findings:
        raise ValidationError(
            "builder produced an invalid graph: " + "; ".join(findings)
        )
    index = build_index(
        graph, embedder,
        max_chunk_tokens=max_chunk_tokens, chunk_overlap=chunk_overlap,
    )
    for warning in report.warnings:
        logger.warning("%s", warning)
    return graph, index, report
