from __future__ import annotations

import pytest

from ticketgraph.adapters import AdapterRequest, CallableAdapter, FailingAdapter
from ticketgraph.corpus import FIXTURE_REPRODUCE_QUERY
from ticketgraph.embedding import HashEmbedder
from ticketgraph.engine import (
    MODE_FALLBACK,
    MODE_GRAPH,
    NO_RESULT_TEXT,
    TicketGraphEngine,
    compose_rows,
)
from ticketgraph.errors import ConfigurationError


def test_compose_rows_format():
    rows = [("A-1", "summary", "it broke"), ("A-1", "fix solution", "restart")]
    assert compose_rows(rows) == (
        "Per ticket A-1 — summary: it broke\n"
        "Per ticket A-1 — fix solution: restart"
    )


def test_reproduce_query_answers_from_the_graph(fixture_engine):
    detail = fixture_engine.answer_detailed(FIXTURE_REPRODUCE_QUERY)
    answer = detail.answer
    assert answer.mode == MODE_GRAPH
    assert detail.fallback_reason is None
    assert answer.provenance == (("ENT-22970", "steps to reproduce"),)
    steps = fixture_engine.graph.trees["ENT-22970"].section_text("steps to reproduce")
    assert answer.text == f"Per ticket ENT-22970 — steps to reproduce: {steps}"
    assert "HAS_STEPS_TO_REPRODUCE" in detail.plan_rendered


def test_fix_query_returns_fix_sections(fixture_engine):
    detail = fixture_engine.answer_detailed("fix for csv upload error")
    assert detail.answer.mode == MODE_GRAPH
    sections = {section for _tid, section in detail.answer.provenance}
    assert "fix solution" in sections


def test_answer_is_answer_detailed_text(fixture_engine):
    query = "how to fix the csv upload error"
    assert fixture_engine.answer(query).text == fixture_engine.answer_detailed(query).answer.text


def test_unparseable_query_falls_back(fixture_engine):
    detail = fixture_engine.answer_detailed("of the and to")
    assert detail.answer.mode == MODE_FALLBACK
    assert detail.fallback_reason is not None
    assert "unparseable" in detail.fallback_reason
    assert detail.baseline_hits
    assert detail.answer.text.startswith("[")
    assert detail.answer.provenance == ()


def test_fallback_text_lists_baseline_chunks(fixture_engine):
    detail = fixture_engine.answer_detailed("zzz qqq www")
    assert detail.answer.mode == MODE_FALLBACK
    assert detail.baseline_hits
    expected = "\n\n".join(
        f"[{hit.ticket_id}] {hit.chunk_text}" for hit in detail.baseline_hits
    )
    assert detail.answer.text == expected


def test_mentioned_ticket_anchors_the_plan(fixture_engine):
    detail = fixture_engine.answer_detailed("how was PORT-133061 resolved?")
    assert detail.answer.mode == MODE_GRAPH
    assert detail.plan.anchor_tickets == ("PORT-133061",)
    assert detail.ranked[0].ticket_id == "PORT-133061"


def test_unknown_mention_does_not_block_answering(fixture_engine):
    detail = fixture_engine.answer_detailed("fix for csv upload error in FAKE-99999")
    assert detail.answer.mode == MODE_GRAPH
    assert all(tid != "FAKE-99999" for tid, _s in detail.answer.provenance)


def test_rank_tickets_orders_whole_corpus(fixture_engine):
    ranked = fixture_engine.rank_tickets("csv upload error", k=4)
    assert len(ranked) == 4
    assert ranked[0].score >= ranked[-1].score
    assert {s.ticket_id for s in ranked} == set(fixture_engine.graph.trees)


def test_rank_tickets_unparseable_is_empty(fixture_engine):
    assert fixture_engine.rank_tickets("of the and") == []


def test_zero_deadline_forces_fallback(fixture_build, embedder):
    graph, index, baseline, _report = fixture_build
    engine = TicketGraphEngine(
        graph=graph, index=index, baseline=baseline, embedder=embedder,
        deadline_s=0.0,
    )
    detail = engine.answer_detailed("fix for csv upload error")
    assert detail.answer.mode == MODE_FALLBACK
    assert "deadline" in detail.fallback_reason


def test_per_call_deadline_overrides_engine_default(fixture_engine):
    detail = fixture_engine.answer_detailed("fix for csv upload error", deadline_s=0.0)
    assert detail.answer.mode == MODE_FALLBACK


def test_failing_adapter_never_breaks_answering(fixture_build, embedder):
    graph, index, baseline, _report = fixture_build
    engine = TicketGraphEngine(
        graph=graph, index=index, baseline=baseline, embedder=embedder,
        adapter=FailingAdapter(),
    )
    detail = engine.answer_detailed("fix for csv upload error")
    # Adapter failures at parse/plan/compose all degrade gracefully; the
    # lexicon and deterministic planner still produce a graph answer.
    assert detail.answer.mode == MODE_GRAPH
    assert detail.answer.text


def test_compose_adapter_text_is_used(fixture_build, embedder):
    graph, index, baseline, _report = fixture_build

    def fake(request: AdapterRequest) -> str:
        if request.task == "compose_answer":
            return "composed by adapter"
        from ticketgraph.errors import AdapterError

        raise AdapterError("only compose is stubbed")

    engine = TicketGraphEngine(
        graph=graph, index=index, baseline=baseline, embedder=embedder,
        adapter=CallableAdapter(fake),
    )
    detail = engine.answer_detailed("fix for csv upload error")
    assert detail.answer.mode == MODE_GRAPH
    assert detail.answer.text == "composed by adapter"
    # Provenance still reflects the executed plan rows, not the adapter.
    assert detail.answer.provenance


def test_blank_compose_result_uses_deterministic_text(fixture_build, embedder):
    graph, index, baseline, _report = fixture_build

    def fake(request: AdapterRequest) -> str:
        if request.task == "compose_answer":
            return "   "
        from ticketgraph.errors import AdapterError

        raise AdapterError("not handled")

    engine = TicketGraphEngine(
        graph=graph, index=index, baseline=baseline, embedder=embedder,
        adapter=CallableAdapter(fake),
    )
    detail = engine.answer_detailed("fix for csv upload error")
    assert detail.answer.text.startswith("Per ticket ")


def test_no_results_text_when_baseline_is_empty(embedder, template):
    from ticketgraph.baseline import build_baseline
    from ticketgraph.builder import build_graph

    graph, index, _report = build_graph([], embedder=embedder, template=template)
    baseline = build_baseline([], embedder)
    engine = TicketGraphEngine(
        graph=graph, index=index, baseline=baseline, embedder=embedder
    )
    detail = engine.answer_detailed("fix for anything")
    assert detail.answer.mode == MODE_FALLBACK
    assert detail.answer.text == NO_RESULT_TEXT
    assert detail.baseline_hits == []


def test_fingerprint_mismatch_refused_at_init(fixture_build):
    graph, index, baseline, _report = fixture_build
    with pytest.raises(ConfigurationError, match="fingerprint"):
        TicketGraphEngine(
            graph=graph, index=index, baseline=baseline,
            embedder=HashEmbedder(dimension=128),
        )


def test_provenance_names_real_nodes(fixture_engine):
    for query in (
        FIXTURE_REPRODUCE_QUERY,
        "fix for csv upload error",
        "priority of the bulk account import failure",
    ):
        detail = fixture_engine.answer_detailed(query)
        if detail.answer.mode != MODE_GRAPH:
            continue
        for tid, section in detail.answer.provenance:
            tree = fixture_engine.graph.trees[tid]
            assert tree.has_section(section)
            # The deterministic composer quotes every cited node verbatim.
            assert tree.section_text(section) in detail.answer.text
        assert detail.plan is not None
