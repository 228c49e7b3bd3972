from __future__ import annotations

import numpy as np
import pytest

from ticketgraph.baseline import (
    build_baseline,
    flatten_ticket,
    load_baseline,
    retrieve_baseline,
    save_baseline,
)
from ticketgraph.corpus import synthetic_corpus
from ticketgraph.embedding import HashEmbedder, chunk_text
from ticketgraph.errors import ConfigurationError, SnapshotError
from ticketgraph.parsing import RawTicket


def test_flatten_joins_title_and_body():
    assert flatten_ticket(RawTicket(ticket_id="A-1", title="t", body="b")) == "t\n\nb"
    assert flatten_ticket(RawTicket(ticket_id="A-1", title="t")) == "t"
    assert flatten_ticket(RawTicket(ticket_id="A-1", body="b")) == "b"
    assert flatten_ticket(RawTicket(ticket_id="A-1")) == ""


def test_short_ticket_is_one_chunk(embedder):
    tickets = [RawTicket(ticket_id="A-1", title="short", body="ticket")]
    baseline = build_baseline(tickets, embedder)
    assert len(baseline.chunks) == 1
    assert baseline.chunks[0].text == "short\n\nticket"
    assert baseline.matrix.shape == (1, embedder.dimension)


def test_long_ticket_chunk_count_matches_chunker(embedder):
    body = " ".join(f"w{i}" for i in range(599))  # 600 tokens with the title
    tickets = [RawTicket(ticket_id="A-1", title="t0", body=body)]
    baseline = build_baseline(tickets, embedder)
    flat = flatten_ticket(tickets[0])
    assert len(baseline.chunks) == len(chunk_text(flat)) == 3
    assert [c.chunk_index for c in baseline.chunks] == [0, 1, 2]


def test_identity_query_scores_one(embedder):
    tickets = [
        RawTicket(ticket_id="A-1", title="memory leak in scheduler"),
        RawTicket(ticket_id="B-2", title="csv import fails"),
    ]
    baseline = build_baseline(tickets, embedder)
    hits = retrieve_baseline(baseline, "memory leak in scheduler", embedder, k=2)
    assert hits[0].ticket_id == "A-1"
    assert hits[0].score == pytest.approx(1.0, abs=1e-12)
    assert hits[0].chunk_text == "memory leak in scheduler"


def test_ranking_matches_brute_force(embedder):
    tickets = synthetic_corpus(30, seed=21)
    baseline = build_baseline(tickets, embedder)
    query = "tok5 tok10 tok200"
    hits = retrieve_baseline(baseline, query, embedder, k=30)

    qv = embedder.embed(query)
    best: dict[str, float] = {}
    for chunk, row in zip(baseline.chunks, baseline.matrix):
        score = float(np.dot(row, qv))
        if chunk.ticket_id not in best or score > best[chunk.ticket_id]:
            best[chunk.ticket_id] = score
    expected = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))
    assert [(h.ticket_id) for h in hits] == [tid for tid, _ in expected]
    for hit, (_tid, score) in zip(hits, expected):
        assert hit.score == pytest.approx(score, abs=1e-12)


def test_hit_reports_best_chunk(embedder):
    filler = " ".join(f"pad{i}" for i in range(300))
    body = filler + " special marker phrase deep inside"
    tickets = [RawTicket(ticket_id="A-1", title="t", body=body)]
    baseline = build_baseline(tickets, embedder)
    assert len(baseline.chunks) > 1
    hits = retrieve_baseline(baseline, "special marker phrase", embedder, k=1)
    assert "special marker phrase" in hits[0].chunk_text
    assert hits[0].chunk_index > 0


def test_fingerprint_mismatch_rejected(embedder):
    baseline = build_baseline([RawTicket(ticket_id="A-1", title="x")], embedder)
    other = HashEmbedder(dimension=128)
    with pytest.raises(ConfigurationError, match="fingerprint"):
        retrieve_baseline(baseline, "x", other)


def test_k_validation_and_empty_corpus(embedder):
    baseline = build_baseline([], embedder)
    assert retrieve_baseline(baseline, "anything", embedder) == []
    nonempty = build_baseline([RawTicket(ticket_id="A-1", title="x")], embedder)
    with pytest.raises(ConfigurationError):
        retrieve_baseline(nonempty, "x", embedder, k=0)


def test_round_trip_preserves_everything(tmp_path, embedder):
    tickets = synthetic_corpus(8, seed=2)
    baseline = build_baseline(tickets, embedder)
    path = tmp_path / "baseline.bin"
    save_baseline(baseline, path)
    loaded = load_baseline(path)
    assert loaded.dimension == baseline.dimension
    assert loaded.embedder_fingerprint == baseline.embedder_fingerprint
    assert loaded.max_chunk_tokens == baseline.max_chunk_tokens
    assert loaded.chunk_overlap == baseline.chunk_overlap
    assert loaded.chunks == baseline.chunks
    assert np.array_equal(loaded.matrix, baseline.matrix)


def test_load_rejects_corruption(tmp_path, embedder):
    baseline = build_baseline([RawTicket(ticket_id="A-1", title="x")], embedder)
    path = tmp_path / "baseline.bin"
    save_baseline(baseline, path)

    truncated = tmp_path / "short.bin"
    truncated.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(SnapshotError, match="payload"):
        load_baseline(truncated)

    bogus = tmp_path / "bogus.bin"
    bogus.write_bytes(b"???" * 10)
    with pytest.raises(SnapshotError):
        load_baseline(bogus)

    with pytest.raises(SnapshotError):
        load_baseline(tmp_path / "missing.bin")
