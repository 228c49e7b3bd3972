"""Parse a handful of tickets and inspect the graph that comes out.

Tickets arrive as free text with loose section markers. Parsing turns
each one into a small tree (summary, description, steps, fix, ...), and
the builder then links the trees: explicit edges from tracker link
fields, implicit edges wherever two titles embed close enough together.
"""

from ticketgraph import HashEmbedder, build_graph, neighbors
from ticketgraph.corpus import FIXTURE_THETA, figure_fixture_tickets

embedder = HashEmbedder()
tickets = figure_fixture_tickets()

print(f"parsing {len(tickets)} tickets")
for ticket in tickets:
    print(f"  {ticket.ticket_id}: {ticket.title}")

graph, index, report = build_graph(tickets, embedder=embedder, theta=FIXTURE_THETA)

print("\nper-ticket trees")
for tid in sorted(graph.trees):
    tree = graph.trees[tid]
    for section in sorted(tree.nodes):
        text = tree.nodes[section].text.replace("\n", " ")
        if len(text) > 60:
            text = text[:57] + "..."
        print(f"  {tid:<12} {section:<20} {text}")

print("\ninter-ticket edges")
for edge in graph.edges:
    weight = "" if edge.weight is None else f" (cosine {edge.weight:.3f})"
    print(f"  {edge.src} -[{edge.relation}/{edge.kind}]-> {edge.dst}{weight}")

print("\nneighborhood of ENT-22970")
for other, edge in neighbors(graph, "ENT-22970"):
    print(f"  {other}: {edge.kind} {edge.relation}")

print(f"\nvector index holds {len(index)} chunk embeddings")
if report.warnings:
    print("build warnings:")
    for warning in report.warnings:
        print(f"  {warning}")
else:
    print("build produced no warnings")
