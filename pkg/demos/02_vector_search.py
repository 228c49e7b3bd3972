"""Chunked embeddings and section-scoped vector search.

Long section texts get split into overlapping token windows before
embedding, so one runaway description cannot hide its tail from
retrieval. Search is always scoped to a section: a query about a fix
only competes against fix-solution chunks.
"""

from ticketgraph import HashEmbedder, build_graph, chunk_text, score_tickets, search
from ticketgraph.corpus import synthetic_corpus

embedder = HashEmbedder()
tickets = synthetic_corpus(40, seed=5)
graph, index, report = build_graph(tickets, embedder=embedder, theta=0.9)
print(f"indexed {report.ticket_count} tickets into {len(index)} chunk vectors")

long_description = next(
    tree.nodes["description"].text
    for tree in graph.trees.values()
    if "description" in tree.nodes
    and len(tree.nodes["description"].text.split()) > 256
)
chunks = chunk_text(long_description)
print(f"\none description has {len(long_description.split())} tokens,")
print(f"so it became {len(chunks)} overlapping chunks:")
for i, chunk in enumerate(chunks):
    print(f"  chunk {i}: tokens [{chunk.start_token}, {chunk.end_token})")

query = "tok12 tok44 tok101"
query_vec = embedder.embed(query)
print(f"\ntop description chunks for query {query!r}")
for key, score in search(index, "description", query_vec, k=5):
    ticket_id, section, chunk_index = key
    print(f"  {ticket_id} {section}[{chunk_index}]  cosine {score:.4f}")

print("\nticket-level scores for a two-entity query")
entities = {"description": "tok12 tok44 tok101", "fix solution": "tok7 tok250"}
for ticket_score in score_tickets(entities, index, graph, embedder, k_ticket=5):
    parts = ", ".join(
        f"{section}={value:.3f}"
        for section, value in sorted(ticket_score.per_entity.items())
    )
    print(f"  {ticket_score.ticket_id}  total {ticket_score.score:.4f}  ({parts})")
