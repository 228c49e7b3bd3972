"""Dual-level graph data model: per-ticket section trees plus typed
inter-ticket edges, and the integrity checks everything else relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import NotFoundError
from .template import GraphTemplate, ROOT_SECTION

# (ticket_id, section_name) pair identifying one node.
NodeId = tuple[str, str]

EDGE_EXPLICIT = "explicit"
EDGE_IMPLICIT = "implicit"
IMPLICIT_RELATION = "similar_to"


@dataclass(frozen=True)
class SectionNode:
    """One section of one ticket."""

    node_id: NodeId
    text: str
    parent: Optional[NodeId] = None

    @property
    def ticket_id(self) -> str:
        return self.node_id[0]

    @property
    def section(self) -> str:
        return self.node_id[1]


@dataclass
class TicketTree:
    """A parsed ticket: root node plus one node per extracted section.

    intra_edges hold (parent node_id, child node_id, relation label)
    triples and must form a single tree rooted at `root`.
    """

    ticket_id: str
    root: SectionNode
    nodes: dict[str, SectionNode]
    intra_edges: list[tuple[NodeId, NodeId, str]] = field(default_factory=list)

    def section_text(self, section: str) -> Optional[str]:
        node = self.nodes.get(section)
        return None if node is None else node.text

    def has_section(self, section: str) -> bool:
        return section in self.nodes

    def section_names(self) -> list[str]:
        return [s for s in self.nodes if s != ROOT_SECTION]

    def children_of(self, section: str) -> dict[str, str]:
        """Child section -> relation label for edges out of `section`."""
        out: dict[str, str] = {}
        for parent_id, child_id, label in self.intra_edges:
            if parent_id[1] == section:
                out[child_id[1]] = label
        return out


@dataclass(frozen=True)
class InterTicketEdge:
    """A typed edge between two tickets.

    Explicit edges come from tracker link fields and carry no weight.
    Implicit edges carry the title-embedding cosine similarity and are
    stored symmetrically: (a, b) present iff (b, a) present.
    """

    src: str
    dst: str
    kind: str
    relation: str
    weight: Optional[float] = None

    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.src, self.dst, self.kind, self.relation)


@dataclass
class KnowledgeGraph:
    """Immutable-after-build snapshot of all ticket trees and edges."""

    template: GraphTemplate
    trees: dict[str, TicketTree]
    edges: list[InterTicketEdge]
    build_params: dict = field(default_factory=dict)

    def ticket_ids(self) -> list[str]:
        return sorted(self.trees)

    def node_count(self) -> int:
        return sum(len(t.nodes) for t in self.trees.values())


def _validate_tree(tree: TicketTree, template: GraphTemplate, problems: list[str]) -> None:
    tid = tree.ticket_id
    if tree.root.node_id not in {n.node_id for n in tree.nodes.values()}:
        problems.append(f"ticket {tid}: root node not present in nodes")
        return

    seen_ids: set[NodeId] = set()
    for section, node in tree.nodes.items():
        if node.node_id in seen_ids:
            problems.append(f"ticket {tid}: duplicate node id {node.node_id}")
        seen_ids.add(node.node_id)
        if node.node_id != (tid, section):
            problems.append(
                f"ticket {tid}: node keyed {section!r} carries id {node.node_id}"
            )
        if section != ROOT_SECTION and template.resolve(section) != section:
            problems.append(f"ticket {tid}: section {section!r} not in template")
        if node.parent is not None and node.parent not in seen_ids | {
            n.node_id for n in tree.nodes.values()
        }:
            problems.append(
                f"ticket {tid}: node {section!r} parent {node.parent} missing from tree"
            )

    if len(tree.intra_edges) != len(tree.nodes) - 1:
        problems.append(
            f"ticket {tid}: {len(tree.intra_edges)} edges for {len(tree.nodes)} nodes "
            "(tree requires exactly nodes-1)"
        )

    # Each non-root node has exactly one incoming edge and all nodes are
    # reachable from the root.
    incoming: dict[NodeId, int] = {}
    adjacency: dict[NodeId, list[NodeId]] = {}
    node_ids = {n.node_id for n in tree.nodes.values()}
    for parent_id, child_id, _label in tree.intra_edges:
        if parent_id not in node_ids or child_id not in node_ids:
            problems.append(f"ticket {tid}: edge {parent_id}->{child_id} leaves the tree")
            continue
        incoming[child_id] = incoming.get(child_id, 0) + 1
        adjacency.setdefault(parent_id, []).append(child_id)
    for node in tree.nodes.values():
        if node.node_id == tree.root.node_id:
            if incoming.get(node.node_id):
                problems.append(f"ticket {tid}: root has an incoming edge")
            continue
        count = incoming.get(node.node_id, 0)
        if count != 1:
            problems.append(
                f"ticket {tid}: node {node.section!r} has {count} parents (expected 1)"
            )
    reached = {tree.root.node_id}
    frontier = [tree.root.node_id]
    while frontier:
        for child in adjacency.get(frontier.pop(), ()):
            if child not in reached:
                reached.add(child)
                frontier.append(child)
    unreachable = sorted(node_ids - reached)
    if unreachable:
        problems.append(f"ticket {tid}: nodes unreachable from root: {unreachable}")


def validate_graph(graph: KnowledgeGraph) -> list[str]:
    """Return a description of every violated invariant; empty when clean.

    Total: never raises, reports instead.
    """
    problems: list[str] = []

    for tid, tree in graph.trees.items():
        if tree.ticket_id != tid:
            problems.append(f"ticket {tid}: tree carries mismatched id {tree.ticket_id}")
        _validate_tree(tree, graph.template, problems)

    seen_edges: set[tuple[str, str, str, str]] = set()
    implicit: dict[tuple[str, str], float] = {}
    for edge in graph.edges:
        tag = f"edge {edge.src}->{edge.dst} ({edge.kind}/{edge.relation})"
        if edge.src == edge.dst:
            problems.append(f"{tag}: self loop")
        for endpoint in (edge.src, edge.dst):
            if endpoint not in graph.trees:
                problems.append(f"{tag}: endpoint {endpoint!r} has no tree")
        key = edge.sort_key()
        if key in seen_edges:
            problems.append(f"{tag}: duplicate edge")
        seen_edges.add(key)
        if edge.kind == EDGE_IMPLICIT:
            if edge.weight is None or not -1.0 <= edge.weight <= 1.0:
                problems.append(f"{tag}: implicit weight {edge.weight!r} outside [-1, 1]")
            else:
                implicit[(edge.src, edge.dst)] = edge.weight
        elif edge.kind == EDGE_EXPLICIT:
            if edge.weight is not None:
                problems.append(f"{tag}: explicit edge carries weight {edge.weight!r}")
        else:
            problems.append(f"{tag}: unknown edge kind")

    for (a, b), weight in implicit.items():
        mirror = implicit.get((b, a))
        if mirror is None:
            problems.append(f"edge {a}->{b} (implicit): missing mirrored edge {b}->{a}")
        elif mirror != weight:
            problems.append(
                f"edge {a}->{b} (implicit): weight {weight} != mirrored weight {mirror}"
            )

    return problems


def neighbors(
    graph: KnowledgeGraph,
    ticket_id: str,
    kind_filter: Optional[str] = None,
) -> list[tuple[str, InterTicketEdge]]:
    """All edges incident to `ticket_id`, as (other ticket, edge) pairs.

    Implicit edges are stored in both directions, so only the outgoing
    copy is reported. Deterministic: sorted by the other ticket's id,
    then kind and relation.
    """
    if ticket_id not in graph.trees:
        raise NotFoundError(f"unknown ticket id {ticket_id!r}")
    found: list[tuple[str, InterTicketEdge]] = []
    for edge in graph.edges:
        if edge.kind == EDGE_IMPLICIT:
            if edge.src == ticket_id:
                found.append((edge.dst, edge))
        elif edge.src == ticket_id:
            found.append((edge.dst, edge))
        elif edge.dst == ticket_id:
            found.append((edge.src, edge))
    if kind_filter is not None:
        found = [(other, e) for other, e in found if e.kind == kind_filter]
    found.sort(key=lambda pair: (pair[0], pair[1].kind, pair[1].relation))
    return found
