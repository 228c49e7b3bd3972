"""The online answer pipeline: parse, score, plan, execute, compose.

Every stage failure (unparseable query, no candidates, empty plan rows,
adapter trouble, deadline expiry) degrades to flat chunk retrieval
instead of raising, so `answer` is total over non-empty queries.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

from .adapters import AdapterRequest, TASK_COMPOSE, TextGenerationAdapter
from .baseline import BaselineHit, BaselineIndex, retrieve_baseline
from .embedding import Embedder
from .errors import (
    AdapterError,
    ConfigurationError,
    PlanError,
    TicketGraphError,
    UnparseableQueryError,
)
from .index import VectorIndex
from .model import KnowledgeGraph
from .planning import GraphQueryPlan, execute_plan, plan_subgraph_query, render_plan
from .querying import QueryParse, parse_query
from .scoring import CHUNK_AGG_MAX, TicketScore, score_tickets

logger = logging.getLogger(__name__)

MODE_GRAPH = "graph"
MODE_FALLBACK = "fallback"

NO_RESULT_TEXT = "No matching tickets were found."


def compose_rows(rows: list[tuple[str, str, str]]) -> str:
    """The deterministic answer composer over plan rows."""
    return "\n".join(
        f"Per ticket {tid} — {section}: {text}" for tid, section, text in rows
    )


@dataclass(frozen=True)
class Answer:
    """The composed answer plus where its content came from."""

    text: str
    provenance: tuple[tuple[str, str], ...]
    mode: str


@dataclass
class AnswerDetail:
    """Full pipeline trace behind one answer, for the CLI and service."""

    answer: Answer
    parse: Optional[QueryParse] = None
    plan: Optional[GraphQueryPlan] = None
    plan_rendered: str = ""
    ranked: list[TicketScore] = field(default_factory=list)
    baseline_hits: list[BaselineHit] = field(default_factory=list)
    fallback_reason: Optional[str] = None


class TicketGraphEngine:
    """Read-only QA engine over one graph snapshot.

    All inputs are immutable after construction, so concurrent answer()
    calls are safe. The embedder fingerprint must match both indexes.
    """

    def __init__(
        self,
        graph: KnowledgeGraph,
        index: VectorIndex,
        baseline: BaselineIndex,
        embedder: Embedder,
        adapter: Optional[TextGenerationAdapter] = None,
        k_ticket: int = 3,
        anchor_count: int = 1,
        chunk_agg: str = CHUNK_AGG_MAX,
        deadline_s: Optional[float] = None,
    ):
        for name, fingerprint in (
            ("vector index", index.embedder_fingerprint),
            ("baseline index", baseline.embedder_fingerprint),
        ):
            if fingerprint != embedder.fingerprint:
                raise ConfigurationError(
                    f"{name} fingerprint {fingerprint!r} does not match "
                    f"embedder {embedder.fingerprint!r}"
                )
        self.graph = graph
        self.index = index
        self.baseline = baseline
        self.embedder = embedder
        self.adapter = adapter
        self.k_ticket = k_ticket
        self.anchor_count = anchor_count
        self.chunk_agg = chunk_agg
        self.deadline_s = deadline_s

    @property
    def template(self):
        return self.graph.template

    def rank_tickets(self, query: str, k: Optional[int] = None) -> list[TicketScore]:
        """Graph-side ticket ranking for a raw query; [] when unusable.

        Mentioned ticket ids rank ahead of scored ones. Used by answer()
        anchoring and by evaluation.
        """
        try:
            parse = parse_query(query, self.template, self.adapter)
        except UnparseableQueryError:
            return []
        return self._rank_from_parse(parse, k)

    def _rank_from_parse(self, parse: QueryParse, k: Optional[int]) -> list[TicketScore]:
        limit = k if k is not None else max(len(self.graph.trees), 1)
        scored: list[TicketScore] = []
        if parse.entities:
            try:
                scored = score_tickets(
                    parse.entities,
                    self.index,
                    self.graph,
                    self.embedder,
                    k_ticket=limit,
                    chunk_agg=self.chunk_agg,
                )
            except TicketGraphError as exc:
                logger.warning("scoring failed: %s", exc)
                scored = []
        mentioned = [
            m for m in parse.ticket_mentions if m in self.graph.trees
        ]
        if not mentioned:
            return scored[:limit]
        by_id = {s.ticket_id: s for s in scored}
        head = [
            by_id.get(m, TicketScore(ticket_id=m, score=0.0, per_entity={}))
            for m in mentioned
        ]
        tail = [s for s in scored if s.ticket_id not in set(mentioned)]
        return (head + tail)[:limit]

    def answer(self, query: str, deadline_s: Optional[float] = None) -> Answer:
        return self.answer_detailed(query, deadline_s=deadline_s).answer

    def answer_detailed(
        self, query: str, deadline_s: Optional[float] = None
    ) -> AnswerDetail:
        started = time.monotonic()
        budget = deadline_s if deadline_s is not None else self.deadline_s

        def expired() -> bool:
            return budget is not None and (time.monotonic() - started) > budget

        detail = AnswerDetail(answer=Answer(text="", provenance=(), mode=MODE_FALLBACK))
        try:
            detail.parse = parse_query(query, self.template, self.adapter)
        except UnparseableQueryError as exc:
            return self._fallback(query, detail, f"unparseable query: {exc}")

        detail.ranked = self._rank_from_parse(detail.parse, k=self.k_ticket)
        if expired():
            return self._fallback(query, detail, "deadline exceeded while scoring")

        mentioned = {
            m for m in detail.parse.ticket_mentions if m in self.graph.trees
        }
        anchors = [s for s in detail.ranked if s.ticket_id in mentioned]
        anchors += [
            s for s in detail.ranked
            if s.ticket_id not in mentioned and s.score > 0.0
        ]
        anchor_count = max(self.anchor_count, len(mentioned))
        anchors = anchors[:anchor_count]
        if not anchors:
            return self._fallback(query, detail, "no candidate tickets")

        try:
            detail.plan = plan_subgraph_query(
                detail.parse,
                anchors,
                self.template,
                adapter=self.adapter,
                anchor_count=len(anchors),
            )
            detail.plan_rendered = render_plan(detail.plan, self.template)
            rows = execute_plan(detail.plan, self.graph)
        except (PlanError, TicketGraphError) as exc:
            return self._fallback(query, detail, f"planning failed: {exc}")
        if not rows:
            return self._fallback(query, detail, "plan matched no sections")
        if expired():
            return self._fallback(query, detail, "deadline exceeded while planning")

        detail.answer = Answer(
            text=self._compose(query, rows),
            provenance=tuple((tid, section) for tid, section, _ in rows),
            mode=MODE_GRAPH,
        )
        return detail

    def _compose(self, query: str, rows: list[tuple[str, str, str]]) -> str:
        deterministic = compose_rows(rows)
        if self.adapter is None:
            return deterministic
        request = AdapterRequest(
            prompt=(
                "Answer the query from these ticket sections only.\n\nQuery: "
                + query
            ),
            context={
                "task": TASK_COMPOSE,
                "rows": [list(r) for r in rows],
            },
        )
        try:
            text = self.adapter.complete(request).strip()
            return text if text else deterministic
        except AdapterError as exc:
            logger.warning("adapter compose failed (%s); using template composer", exc)
            return deterministic

    def _fallback(self, query: str, detail: AnswerDetail, reason: str) -> AnswerDetail:
        detail.fallback_reason = reason
        logger.info("falling back to chunk retrieval: %s", reason)
        try:
            detail.baseline_hits = retrieve_baseline(
                self.baseline, query, self.embedder, k=self.k_ticket
            )
        except TicketGraphError as exc:
            logger.warning("baseline retrieval failed: %s", exc)
            detail.baseline_hits = []
        if detail.baseline_hits:
            text = "\n\n".join(
                f"[{hit.ticket_id}] {hit.chunk_text}" for hit in detail.baseline_hits
            )
        else:
            text = NO_RESULT_TEXT
        detail.answer = Answer(text=text, provenance=(), mode=MODE_FALLBACK)
        return detail
