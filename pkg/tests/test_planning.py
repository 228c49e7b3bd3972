from __future__ import annotations

import json

import pytest

from ticketgraph.adapters import CallableAdapter, FailingAdapter
from ticketgraph.errors import PlanError
from ticketgraph.planning import (
    DEFAULT_RETURN_SECTIONS,
    GraphQueryPlan,
    deterministic_plan,
    execute_plan,
    plan_subgraph_query,
    render_plan,
)
from ticketgraph.querying import QueryParse
from ticketgraph.scoring import TicketScore


def _parse(intents=(), entities=None, query="q") -> QueryParse:
    return QueryParse(
        entities=entities or {},
        intents=frozenset(intents),
        raw_query=query,
    )


def _top(*tids: str) -> list[TicketScore]:
    return [
        TicketScore(ticket_id=tid, score=1.0 - 0.1 * i, per_entity={})
        for i, tid in enumerate(tids)
    ]


class TestDeterministicPlan:
    def test_intents_become_return_sections(self, template):
        plan = deterministic_plan(
            frozenset({"steps to reproduce"}), ("A-1",), template
        )
        assert plan.return_sections == ("steps to reproduce",)
        assert plan.path == ("HAS_DESCRIPTION", "HAS_STEPS_TO_REPRODUCE")
        assert plan.anchor_tickets == ("A-1",)

    def test_no_intents_defaults_to_summary_and_fix(self, template):
        plan = deterministic_plan(frozenset(), ("A-1",), template)
        assert plan.return_sections == DEFAULT_RETURN_SECTIONS
        # fix solution is the deeper of the two defaults.
        assert plan.path == ("HAS_DESCRIPTION", "HAS_FIX_SOLUTION")

    def test_sections_come_out_in_template_order(self, template):
        plan = deterministic_plan(
            frozenset({"fix solution", "summary", "priority"}), ("A-1",), template
        )
        assert plan.return_sections == ("summary", "priority", "fix solution")

    def test_unknown_intents_are_ignored(self, template):
        plan = deterministic_plan(
            frozenset({"not a section"}), ("A-1",), template
        )
        assert plan.return_sections == DEFAULT_RETURN_SECTIONS


class TestPlanSubgraphQuery:
    def test_top_ticket_is_the_anchor(self, template):
        plan = plan_subgraph_query(_parse({"summary"}), _top("B-2", "A-1"), template)
        assert plan.anchor_tickets == ("B-2",)

    def test_anchor_count_widens_anchors(self, template):
        plan = plan_subgraph_query(
            _parse(), _top("B-2", "A-1", "C-3"), template, anchor_count=2
        )
        assert plan.anchor_tickets == ("B-2", "A-1")

    def test_empty_candidates_is_a_plan_error(self, template):
        with pytest.raises(PlanError):
            plan_subgraph_query(_parse(), [], template)

    def test_adapter_plan_is_accepted_when_valid(self, template):
        payload = {
            "anchors": ["A-1"],
            "path": ["HAS_DESCRIPTION"],
            "return_sections": ["description"],
        }
        adapter = CallableAdapter(lambda req: json.dumps(payload))
        plan = plan_subgraph_query(_parse(), _top("A-1"), template, adapter=adapter)
        assert plan == GraphQueryPlan(
            anchor_tickets=("A-1",),
            path=("HAS_DESCRIPTION",),
            return_sections=("description",),
        )

    def test_adapter_foreign_anchor_rejected(self, template):
        payload = {
            "anchors": ["Z-99"],
            "path": [],
            "return_sections": ["summary"],
        }
        adapter = CallableAdapter(lambda req: json.dumps(payload))
        plan = plan_subgraph_query(
            _parse({"summary"}), _top("A-1"), template, adapter=adapter
        )
        assert plan.anchor_tickets == ("A-1",)  # deterministic plan answered

    def test_adapter_unknown_relation_rejected(self, template):
        payload = {
            "anchors": ["A-1"],
            "path": ["HAS_NONSENSE"],
            "return_sections": ["summary"],
        }
        adapter = CallableAdapter(lambda req: json.dumps(payload))
        plan = plan_subgraph_query(_parse(), _top("A-1"), template, adapter=adapter)
        assert plan.return_sections == DEFAULT_RETURN_SECTIONS

    def test_adapter_unknown_section_rejected(self, template):
        payload = {"anchors": ["A-1"], "path": [], "return_sections": ["nope"]}
        adapter = CallableAdapter(lambda req: json.dumps(payload))
        plan = plan_subgraph_query(_parse(), _top("A-1"), template, adapter=adapter)
        assert plan.return_sections == DEFAULT_RETURN_SECTIONS

    def test_adapter_failure_uses_deterministic_plan(self, template):
        plan = plan_subgraph_query(
            _parse({"priority"}), _top("A-1"), template, adapter=FailingAdapter()
        )
        assert plan.return_sections == ("priority",)


class TestRenderPlan:
    def test_rendered_form_names_relations_and_anchors(self, template):
        plan = deterministic_plan(
            frozenset({"steps to reproduce"}), ("ENT-22970",), template
        )
        rendered = render_plan(plan, template)
        assert "MATCH (t:Ticket)" in rendered
        assert "-[:HAS_DESCRIPTION]->(description:Section)" in rendered
        assert "-[:HAS_STEPS_TO_REPRODUCE]->(steps_to_reproduce:Section)" in rendered
        assert 'WHERE t.ticket_id IN ["ENT-22970"]' in rendered
        assert rendered.endswith("RETURN steps_to_reproduce.text")

    def test_multiple_sections_render_multiple_matches(self, template):
        plan = deterministic_plan(frozenset(), ("A-1", "B-2"), template)
        rendered = render_plan(plan, template)
        assert rendered.count("MATCH") == 2
        assert '"A-1", "B-2"' in rendered
        assert "RETURN summary.text, fix_solution.text" in rendered


class TestExecutePlan:
    def test_rows_in_anchor_then_section_order(self, fixture_build, template):
        graph, _index, _baseline, _report = fixture_build
        plan = GraphQueryPlan(
            anchor_tickets=("ENT-3547", "ENT-1744"),
            path=(),
            return_sections=("summary", "fix solution"),
        )
        rows = execute_plan(plan, graph)
        assert [(tid, section) for tid, section, _text in rows] == [
            ("ENT-3547", "fix solution"),
            ("ENT-3547", "summary"),
            ("ENT-1744", "fix solution"),
            ("ENT-1744", "summary"),
        ]

    def test_rows_carry_full_section_text(self, fixture_build, template):
        graph, _index, _baseline, _report = fixture_build
        plan = GraphQueryPlan(
            anchor_tickets=("ENT-1744",), path=(), return_sections=("fix solution",)
        )
        rows = execute_plan(plan, graph)
        assert rows == [
            (
                "ENT-1744",
                "fix solution",
                graph.trees["ENT-1744"].section_text("fix solution"),
            )
        ]

    def test_absent_section_yields_no_row(self, fixture_build, template):
        graph, _index, _baseline, _report = fixture_build
        # ENT-1744 has no steps-to-reproduce section.
        plan = GraphQueryPlan(
            anchor_tickets=("ENT-1744",),
            path=(),
            return_sections=("steps to reproduce",),
        )
        assert execute_plan(plan, graph) == []

    def test_unknown_anchor_raises(self, fixture_build, template):
        graph, _index, _baseline, _report = fixture_build
        plan = GraphQueryPlan(
            anchor_tickets=("MISSING-1",), path=(), return_sections=("summary",)
        )
        with pytest.raises(PlanError):
            execute_plan(plan, graph)
