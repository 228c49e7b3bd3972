"""Deterministic stub adapter wiring.

The stub answers every adapter task with exactly what the deterministic
code path would produce, serialized as JSON (or plain text for answer
composition). That exercises the full adapter round trip: prompt out,
text back, parse, validate, accept, while staying offline and
reproducible.
"""

from __future__ import annotations

from .adapters import (
    AdapterRequest,
    StubAdapter,
    TASK_COMPOSE,
    TASK_PARSE_QUERY,
    TASK_PARSE_SECTIONS,
    TASK_PLAN,
)
from .engine import compose_rows
from .parsing import fallback_segment
from .planning import deterministic_plan
from .querying import lexicon_parse
from .template import GraphTemplate


def build_stub_adapter(template: GraphTemplate) -> StubAdapter:
    adapter = StubAdapter()

    def handle_sections(request: AdapterRequest) -> dict:
        return fallback_segment(str(request.context.get("text", "")), template)

    def handle_query(request: AdapterRequest) -> dict:
        entities, intents = lexicon_parse(
            str(request.context.get("query", "")), template
        )
        return {"entities": entities, "intents": sorted(intents)}

    def handle_plan(request: AdapterRequest) -> dict:
        anchors = tuple(str(a) for a in request.context.get("anchors", []))
        intents = frozenset(str(i) for i in request.context.get("intents", []))
        plan = deterministic_plan(intents, anchors, template)
        return {
            "anchors": list(plan.anchor_tickets),
            "path": list(plan.path),
            "return_sections": list(plan.return_sections),
        }

    def handle_compose(request: AdapterRequest) -> str:
        rows = [
            (str(r[0]), str(r[1]), str(r[2]))
            for r in request.context.get("rows", [])
        ]
        return compose_rows(rows)

    adapter.register(TASK_PARSE_SECTIONS, handle_sections)
    adapter.register(TASK_PARSE_QUERY, handle_query)
    adapter.register(TASK_PLAN, handle_plan)
    adapter.register(TASK_COMPOSE, handle_compose)
    return adapter
