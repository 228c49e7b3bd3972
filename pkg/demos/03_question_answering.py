"""Ask questions against the graph and watch the pipeline decide.

A query is parsed into intents (which sections to return) and entities
(what to match on), the best tickets are anchored, and a structured
traversal plan pulls the requested sections. Anything the pipeline
cannot handle drops to flat chunk retrieval instead of failing.
"""

from ticketgraph import HashEmbedder, TicketGraphEngine, build_baseline, build_graph
from ticketgraph.corpus import (
    FIXTURE_REPRODUCE_QUERY,
    FIXTURE_THETA,
    figure_fixture_tickets,
)

embedder = HashEmbedder()
tickets = figure_fixture_tickets()
graph, index, _report = build_graph(tickets, embedder=embedder, theta=FIXTURE_THETA)
engine = TicketGraphEngine(
    graph=graph,
    index=index,
    baseline=build_baseline(tickets, embedder),
    embedder=embedder,
)

queries = [
    FIXTURE_REPRODUCE_QUERY,          # asks for reproduction steps
    "fix for csv upload error",        # asks for the fix of a topic
    "what is PORT-133061 about?",      # anchors on a mentioned ticket
    "?!",                              # nothing extractable: falls back
]

for query in queries:
    detail = engine.answer_detailed(query)
    print(f"Q: {query}")
    print(f"   mode: {detail.answer.mode}")
    if detail.parse is not None:
        print(f"   intents: {sorted(detail.parse.intents) or '(default)'}")
        entities = {k: v for k, v in sorted(detail.parse.entities.items())}
        print(f"   entities: {entities}")
    if detail.plan_rendered:
        for line in detail.plan_rendered.splitlines():
            print(f"   | {line}")
    if detail.fallback_reason:
        print(f"   fallback reason: {detail.fallback_reason}")
    answer = detail.answer.text
    if len(answer) > 300:
        answer = answer[:297] + "..."
    for line in answer.splitlines():
        print(f"   > {line}")
    print()
