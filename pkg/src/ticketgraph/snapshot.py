"""Byte-stable on-disk snapshots of a built graph and its indexes.

A snapshot is a directory:

    manifest.json    counts, build params, per-file sha256, version id
    template.yaml    the section template
    trees.jsonl      one ticket tree per line, id-sorted
    edges.jsonl      inter-ticket edges, canonically sorted
    index.bin        section vector index
    baseline.bin     flat chunk index (optional)

Writes go to a temp directory that replaces the target in one rename, so
a crash never leaves a half-written snapshot behind. Nothing in the
layout depends on wall-clock time: the same build inputs produce the
same bytes, and snapshot_version is a digest of the content itself.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
from pathlib import Path
from typing import Optional

from .baseline import BaselineIndex, load_baseline, save_baseline
from .errors import SnapshotError
from .index import VectorIndex, load_index, save_index
from .model import (
    InterTicketEdge,
    KnowledgeGraph,
    SectionNode,
    TicketTree,
)
from .template import ROOT_SECTION, template_from_yaml, template_to_yaml

MANIFEST_NAME = "manifest.json"
FORMAT_NAME = "ticketgraph-snapshot"
FORMAT_VERSION = 1

_DATA_FILES = ("template.yaml", "trees.jsonl", "edges.jsonl", "index.bin", "baseline.bin")


def _tree_record(tree: TicketTree) -> dict:
    nodes = []
    for section in sorted(tree.nodes):
        node = tree.nodes[section]
        nodes.append(
            {
                "section": section,
                "text": node.text,
                "parent": None if node.parent is None else node.parent[1],
            }
        )
    edges = sorted(
        [src[1], dst[1], label] for src, dst, label in tree.intra_edges
    )
    return {"ticket_id": tree.ticket_id, "nodes": nodes, "edges": edges}


def _tree_from_record(record: dict) -> TicketTree:
    tid = record["ticket_id"]
    nodes: dict[str, SectionNode] = {}
    for item in record["nodes"]:
        parent = item["parent"]
        nodes[item["section"]] = SectionNode(
            node_id=(tid, item["section"]),
            text=item["text"],
            parent=None if parent is None else (tid, parent),
        )
    if ROOT_SECTION not in nodes:
        raise SnapshotError(f"tree {tid!r} has no root node")
    edges = [
        ((tid, src), (tid, dst), label) for src, dst, label in record["edges"]
    ]
    return TicketTree(ticket_id=tid, root=nodes[ROOT_SECTION], nodes=nodes, intra_edges=edges)


def _edge_record(edge: InterTicketEdge) -> dict:
    record = {
        "src": edge.src,
        "dst": edge.dst,
        "kind": edge.kind,
        "relation": edge.relation,
    }
    if edge.weight is not None:
        record["weight"] = edge.weight
    return record


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def save_snapshot(
    directory: Path,
    graph: KnowledgeGraph,
    index: VectorIndex,
    baseline: Optional[BaselineIndex] = None,
) -> str:
    """Write a snapshot, replacing any existing one. Returns its version id."""
    directory = Path(directory)
    tmp = directory.with_name(directory.name + f".tmp-{os.getpid()}")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    try:
        (tmp / "template.yaml").write_text(
            template_to_yaml(graph.template), encoding="utf-8"
        )
        with open(tmp / "trees.jsonl", "w", encoding="utf-8") as fh:
            for tid in sorted(graph.trees):
                fh.write(json.dumps(_tree_record(graph.trees[tid]), sort_keys=True) + "\n")
        with open(tmp / "edges.jsonl", "w", encoding="utf-8") as fh:
            for edge in sorted(graph.edges, key=lambda e: e.sort_key()):
                fh.write(json.dumps(_edge_record(edge), sort_keys=True) + "\n")
        save_index(index, tmp / "index.bin")
        if baseline is not None:
            save_baseline(baseline, tmp / "baseline.bin")

        hashes = {
            name: _sha256(tmp / name)
            for name in _DATA_FILES
            if (tmp / name).exists()
        }
        version_src = "".join(f"{name}:{hashes[name]};" for name in sorted(hashes))
        snapshot_version = hashlib.sha256(version_src.encode("ascii")).hexdigest()[:16]
        manifest = {
            "format": FORMAT_NAME,
            "format_version": FORMAT_VERSION,
            "snapshot_version": snapshot_version,
            "build_params": graph.build_params,
            "counts": {
                "tickets": len(graph.trees),
                "edges": len(graph.edges),
                "vectors": len(index.entries),
            },
            "files": hashes,
        }
        (tmp / MANIFEST_NAME).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

        if directory.exists():
            shutil.rmtree(directory)
        os.replace(tmp, directory)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return snapshot_version


def read_manifest(directory: Path) -> dict:
    path = Path(directory) / MANIFEST_NAME
    if not path.is_file():
        raise SnapshotError(f"{directory}: no {MANIFEST_NAME}; not a snapshot")
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SnapshotError(f"{path}: unreadable manifest: {exc}") from exc
    if manifest.get("format") != FORMAT_NAME:
        raise SnapshotError(f"{path}: unrecognized format {manifest.get('format')!r}")
    if manifest.get("format_version") != FORMAT_VERSION:
        raise SnapshotError(
            f"{path}: unsupported format_version {manifest.get('format_version')!r}"
        )
    return manifest


def load_snapshot(
    directory: Path, verify: bool = True
) -> tuple[KnowledgeGraph, VectorIndex, Optional[BaselineIndex]]:
    """Load a snapshot directory, checking file hashes against the manifest."""
    directory = Path(directory)
    manifest = read_manifest(directory)

    if verify:
        for name, expected in manifest.get("files", {}).items():
            path = directory / name
            if not path.is_file():
                raise SnapshotError(f"{directory}: missing snapshot file {name}")
            actual = _sha256(path)
            if actual != expected:
                raise SnapshotError(
                    f"{directory}/{name}: content hash mismatch; snapshot is corrupt"
                )

    try:
        template = template_from_yaml(
            (directory / "template.yaml").read_text(encoding="utf-8")
        )
        trees: dict[str, TicketTree] = {}
        with open(directory / "trees.jsonl", "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                tree = _tree_from_record(json.loads(line))
                trees[tree.ticket_id] = tree
        edges: list[InterTicketEdge] = []
        with open(directory / "edges.jsonl", "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                edges.append(
                    InterTicketEdge(
                        src=record["src"],
                        dst=record["dst"],
                        kind=record["kind"],
                        relation=record["relation"],
                        weight=record.get("weight"),
                    )
                )
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise SnapshotError(f"{directory}: corrupt snapshot data: {exc}") from exc

    graph = KnowledgeGraph(
        template=template,
        trees=trees,
        edges=edges,
        build_params=manifest.get("build_params", {}),
    )
    index = load_index(directory / "index.bin")
    baseline = None
    if (directory / "baseline.bin").exists():
        baseline = load_baseline(directory / "baseline.bin")
    return graph, index, baseline
