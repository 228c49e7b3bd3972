"""Structured subgraph query plans: build, validate, render, execute.

A plan owns anchor tickets, one relation path from the ticket root, and
the sections to return. Plans replace textual graph-database queries;
the renderer prints an equivalent Cypher-like form for logs and the UI.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Optional

from .adapters import (
    AdapterRequest,
    TASK_PLAN,
    TextGenerationAdapter,
    parse_json_object,
)
from .errors import AdapterError, PlanError
from .model import KnowledgeGraph
from .querying import QueryParse
from .scoring import TicketScore
from .template import GraphTemplate, section_slug

logger = logging.getLogger(__name__)

DEFAULT_RETURN_SECTIONS = ("summary", "fix solution")


@dataclass(frozen=True)
class GraphQueryPlan:
    """Anchors, the primary relation path, and the sections to return."""

    anchor_tickets: tuple[str, ...]
    path: tuple[str, ...]
    return_sections: tuple[str, ...]


def _ordered_sections(names: set[str], template: GraphTemplate) -> tuple[str, ...]:
    return tuple(n for n in template.section_names() if n in names)


def deterministic_plan(
    intents: frozenset[str],
    anchors: tuple[str, ...],
    template: GraphTemplate,
) -> GraphQueryPlan:
    wanted = {s for s in intents if template.resolve(s)}
    if not wanted:
        wanted = {s for s in DEFAULT_RETURN_SECTIONS if template.resolve(s)}
    return_sections = _ordered_sections(wanted, template)
    # Primary path: the deepest requested section, first-listed on ties.
    path: tuple[str, ...] = ()
    for section in return_sections:
        chain = tuple(template.relation_path_to(section))
        if len(chain) > len(path):
            path = chain
    return GraphQueryPlan(
        anchor_tickets=anchors, path=path, return_sections=return_sections
    )


def _plan_from_adapter(
    raw: str, anchors: tuple[str, ...], template: GraphTemplate
) -> GraphQueryPlan:
    payload = parse_json_object(raw)
    anchor_out = payload.get("anchors", list(anchors))
    path_out = payload.get("path", [])
    sections_out = payload.get("return_sections", [])
    if not isinstance(anchor_out, list) or not isinstance(path_out, list) \
            or not isinstance(sections_out, list):
        raise AdapterError("plan payload has wrong shape")
    allowed = set(anchors)
    plan_anchors = tuple(str(a) for a in anchor_out)
    if not plan_anchors or any(a not in allowed for a in plan_anchors):
        raise AdapterError("plan anchors not drawn from candidate tickets")
    vocabulary = set(template.relation_vocabulary())
    path = tuple(str(p) for p in path_out)
    if any(label not in vocabulary for label in path):
        raise AdapterError("plan path uses unknown relation label")
    resolved: list[str] = []
    for section in sections_out:
        canonical = template.resolve(str(section))
        if canonical is None:
            raise AdapterError(f"plan returns unknown section {section!r}")
        resolved.append(canonical)
    if not resolved:
        raise AdapterError("plan returns no sections")
    return GraphQueryPlan(
        anchor_tickets=plan_anchors,
        path=path,
        return_sections=_ordered_sections(set(resolved), template),
    )


def plan_subgraph_query(
    parse: QueryParse,
    top: list[TicketScore],
    template: GraphTemplate,
    adapter: Optional[TextGenerationAdapter] = None,
    anchor_count: int = 1,
) -> GraphQueryPlan:
    """Build a plan over the top-scored tickets.

    Anchors default to the single best ticket; anchor_count widens that.
    An adapter may propose the plan; anything it gets wrong (unknown
    relation, unknown section, foreign anchors) rejects the proposal and
    the deterministic planner answers instead.
    """
    if not top:
        raise PlanError("no candidate tickets to plan over")
    anchors = tuple(s.ticket_id for s in top[: max(1, anchor_count)])
    if adapter is not None:
        request = AdapterRequest(
            prompt=(
                "Plan a graph traversal answering the query. Respond with one "
                'JSON object {"anchors": [...], "path": [relation labels], '
                '"return_sections": [...]}.\n\nQuery: ' + parse.raw_query
            ),
            context={
                "task": TASK_PLAN,
                "anchors": list(anchors),
                "intents": sorted(parse.intents),
            },
        )
        try:
            return _plan_from_adapter(adapter.complete(request), anchors, template)
        except AdapterError as exc:
            logger.warning("adapter plan rejected (%s); using deterministic planner", exc)
    return deterministic_plan(parse.intents, anchors, template)


def render_plan(plan: GraphQueryPlan, template: GraphTemplate) -> str:
    """Cypher-like text form of a plan, for logs and the console."""
    lines: list[str] = []
    seen_vars: set[str] = set()
    return_vars: list[str] = []
    for section in plan.return_sections:
        chain_sections = template.path_to(section)
        parts = ["(t:Ticket)"]
        for hop_section, hop_label in zip(chain_sections, template.relation_path_to(section)):
            var = section_slug(hop_section)
            parts.append(f"-[:{hop_label}]->({var}:Section)")
            seen_vars.add(var)
        lines.append("MATCH " + "".join(parts))
        return_vars.append(section_slug(section) + ".text")
    anchor_list = ", ".join(json.dumps(a) for a in plan.anchor_tickets)
    lines.append(f"WHERE t.ticket_id IN [{anchor_list}]")
    lines.append("RETURN " + ", ".join(return_vars))
    return "\n".join(lines)


def execute_plan(
    plan: GraphQueryPlan, graph: KnowledgeGraph
) -> list[tuple[str, str, str]]:
    """Run a plan: (ticket_id, section, full text) rows.

    Rows come out in anchor order, then section name order. A section an
    anchor's tree lacks yields no row. Trees attach sections at their
    nearest present ancestor, so the traversal reduces to a lookup of the
    terminal section per anchor.
    """
    rows: list[tuple[str, str, str]] = []
    for anchor in plan.anchor_tickets:
        tree = graph.trees.get(anchor)
        if tree is None:
            raise PlanError(f"anchor ticket {anchor!r} is not in the graph")
        for section in sorted(plan.return_sections):
            if tree.has_section(section):
                rows.append((anchor, section, tree.section_text(section)))
    return rows
