"""Versioned HTTP API over a loaded engine.

Endpoints return stable field names; the CLI's query verb reuses the
same payload builder, so both interfaces are structurally identical for
the same input. A missing snapshot leaves the service answering 503
rather than failing to start, which is what health probes expect.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .config import AppConfig, make_adapter, make_embedder
from .engine import AnswerDetail, TicketGraphEngine
from .errors import ConfigurationError, NotFoundError, SnapshotError
from .model import neighbors
from .snapshot import load_snapshot, read_manifest

logger = logging.getLogger(__name__)

API_PREFIX = "/v1"


class QueryRequest(BaseModel):
    query: str


def load_engine(config: AppConfig) -> tuple[TicketGraphEngine, str]:
    """Build an engine from the configured snapshot directory.

    Raises SnapshotError when no snapshot exists and ConfigurationError
    when the stored indexes do not match the configured embedder.
    """
    snapshot_dir = Path(config.snapshot_dir)
    graph, index, baseline = load_snapshot(snapshot_dir)
    if baseline is None:
        raise ConfigurationError(
            f"snapshot {snapshot_dir} has no baseline index; rebuild it"
        )
    manifest = read_manifest(snapshot_dir)
    embedder = make_embedder(config)
    engine = TicketGraphEngine(
        graph=graph,
        index=index,
        baseline=baseline,
        embedder=embedder,
        adapter=make_adapter(config, graph.template),
        k_ticket=config.k_ticket,
        anchor_count=config.anchor_count,
        chunk_agg=config.chunk_agg,
        deadline_s=config.answer_deadline_s,
    )
    return engine, str(manifest.get("snapshot_version", ""))


def detail_to_payload(query: str, detail: AnswerDetail) -> dict:
    """The one query-result shape shared by the CLI and POST /v1/query."""
    return {
        "query": query,
        "answer": detail.answer.text,
        "mode": detail.answer.mode,
        "provenance": [list(pair) for pair in detail.answer.provenance],
        "ranked_tickets": [
            {
                "ticket_id": score.ticket_id,
                "score": score.score,
                "per_entity": dict(sorted(score.per_entity.items())),
            }
            for score in detail.ranked
        ],
        "plan": detail.plan_rendered,
        "fallback_reason": detail.fallback_reason,
    }


def tree_payload(engine: TicketGraphEngine, ticket_id: str) -> dict:
    tree = engine.graph.trees.get(ticket_id)
    if tree is None:
        raise NotFoundError(f"unknown ticket {ticket_id!r}")
    return {
        "ticket_id": ticket_id,
        "nodes": [
            {
                "section": section,
                "text": tree.nodes[section].text,
                "parent": None
                if tree.nodes[section].parent is None
                else tree.nodes[section].parent[1],
            }
            for section in sorted(tree.nodes)
        ],
        "edges": sorted(
            [src[1], dst[1], label] for src, dst, label in tree.intra_edges
        ),
    }


def neighbors_payload(engine: TicketGraphEngine, ticket_id: str) -> dict:
    found = neighbors(engine.graph, ticket_id)
    return {
        "ticket_id": ticket_id,
        "neighbors": [
            {
                "ticket_id": other,
                "kind": edge.kind,
                "relation": edge.relation,
                "weight": edge.weight,
                "direction": "out" if edge.src == ticket_id else "in",
            }
            for other, edge in found
        ],
    }


def create_app(
    config: AppConfig,
    engine: Optional[TicketGraphEngine] = None,
    snapshot_version: str = "",
) -> FastAPI:
    """Assemble the service. Without a preloaded engine, the configured
    snapshot is loaded lazily at startup; failure leaves a 503 service."""
    app = FastAPI(title="ticketgraph", version="1")
    # the read-only console may be served from any static host
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["authorization", "content-type"],
    )
    app.state.engine = engine
    app.state.snapshot_version = snapshot_version
    app.state.config = config

    if engine is None:
        try:
            app.state.engine, app.state.snapshot_version = load_engine(config)
        except (SnapshotError, ConfigurationError) as exc:
            logger.warning("service starting without a snapshot: %s", exc)
            app.state.load_error = str(exc)

    def require_engine(request: Request) -> TicketGraphEngine:
        current = request.app.state.engine
        if current is None:
            raise HTTPException(
                status_code=503,
                detail=getattr(request.app.state, "load_error", "snapshot not loaded"),
            )
        return current

    def require_token(request: Request) -> None:
        token = request.app.state.config.api_token
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    @app.get(API_PREFIX + "/healthz")
    def healthz(request: Request) -> dict:
        current = request.app.state.engine
        if current is None:
            raise HTTPException(
                status_code=503,
                detail=getattr(request.app.state, "load_error", "snapshot not loaded"),
            )
        return {
            "status": "ok",
            "snapshot_version": request.app.state.snapshot_version,
            "tickets": len(current.graph.trees),
        }

    @app.post(API_PREFIX + "/query")
    def query(
        body: QueryRequest,
        request: Request,
        _=Depends(require_token),
    ) -> dict:
        engine_now = require_engine(request)
        text = body.query
        if not text.strip():
            raise HTTPException(status_code=422, detail="query must be non-empty")
        detail = engine_now.answer_detailed(text)
        if detail.fallback_reason is not None and not detail.baseline_hits:
            raise HTTPException(
                status_code=422,
                detail=f"query not answerable: {detail.fallback_reason}",
            )
        return detail_to_payload(text, detail)

    @app.get(API_PREFIX + "/tickets/{ticket_id}/tree")
    def ticket_tree(
        ticket_id: str,
        request: Request,
        _=Depends(require_token),
    ) -> dict:
        engine_now = require_engine(request)
        try:
            return tree_payload(engine_now, ticket_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get(API_PREFIX + "/graph/neighbors/{ticket_id}")
    def graph_neighbors(
        ticket_id: str,
        request: Request,
        _=Depends(require_token),
    ) -> dict:
        engine_now = require_engine(request)
        try:
            return neighbors_payload(engine_now, ticket_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    return app
