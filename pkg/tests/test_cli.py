from __future__ import annotations

import json

import pytest

from ticketgraph.cli import build_parser, main
from ticketgraph.corpus import FIXTURE_REPRODUCE_QUERY, figure_fixture_tickets
from ticketgraph.parsing import read_tickets_jsonl, write_tickets_jsonl


@pytest.fixture()
def tickets_file(tmp_path):
    path = tmp_path / "tickets.jsonl"
    write_tickets_jsonl(path, figure_fixture_tickets())
    return path


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "conf.yaml"
    path.write_text("theta: 0.55\n", encoding="utf-8")
    return path


def _build_snapshot(tmp_path, tickets_file, config_file, capsys):
    snapshot = tmp_path / "snap"
    code = main([
        "build", str(tickets_file),
        "--config", str(config_file),
        "--snapshot", str(snapshot),
    ])
    assert code == 0
    out = capsys.readouterr().out
    return snapshot, out


def test_ingest_validates(tickets_file, capsys):
    assert main(["ingest", str(tickets_file)]) == 0
    assert "validated 4 tickets" in capsys.readouterr().out


def test_ingest_normalizes_output(tmp_path, tickets_file, capsys):
    out_path = tmp_path / "normalized.jsonl"
    assert main(["ingest", str(tickets_file), "-o", str(out_path)]) == 0
    assert out_path.exists()
    # normalized output is itself valid input and id-sorted
    tickets = read_tickets_jsonl(out_path)
    ids = [t.ticket_id for t in tickets]
    assert ids == sorted(ids)


def test_ingest_bad_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"title": "no id"}\n', encoding="utf-8")
    assert main(["ingest", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_ingest_missing_file_exits_2(tmp_path, capsys):
    assert main(["ingest", str(tmp_path / "absent.jsonl")]) == 2
    assert "error:" in capsys.readouterr().err


def test_build_writes_snapshot(tmp_path, tickets_file, config_file, capsys):
    snapshot, out = _build_snapshot(tmp_path, tickets_file, config_file, capsys)
    assert "built snapshot" in out
    assert "4 tickets" in out
    assert "1 explicit edges" in out
    assert "2 implicit pairs" in out
    assert (snapshot / "manifest.json").exists()


def test_query_human_output(tmp_path, tickets_file, config_file, capsys):
    snapshot, _ = _build_snapshot(tmp_path, tickets_file, config_file, capsys)
    code = main([
        "query", FIXTURE_REPRODUCE_QUERY,
        "--config", str(config_file),
        "--snapshot", str(snapshot),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "mode: graph" in out
    assert "Per ticket ENT-22970" in out
    assert "provenance: ENT-22970/steps to reproduce" in out
    assert "plan:" in out


def test_query_json_output(tmp_path, tickets_file, config_file, capsys):
    snapshot, _ = _build_snapshot(tmp_path, tickets_file, config_file, capsys)
    code = main([
        "query", FIXTURE_REPRODUCE_QUERY, "--json",
        "--config", str(config_file),
        "--snapshot", str(snapshot),
    ])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["mode"] == "graph"
    assert payload["query"] == FIXTURE_REPRODUCE_QUERY
    assert payload["provenance"] == [["ENT-22970", "steps to reproduce"]]
    assert {"answer", "ranked_tickets", "plan", "fallback_reason"} <= set(payload)


def test_query_without_snapshot_exits_2(tmp_path, capsys):
    code = main(["query", "anything", "--snapshot", str(tmp_path / "absent")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_eval_prints_table_and_report(tmp_path, tickets_file, config_file, capsys):
    snapshot, _ = _build_snapshot(tmp_path, tickets_file, config_file, capsys)
    golden = tmp_path / "golden.jsonl"
    golden.write_text(
        json.dumps({
            "query_id": "q1",
            "query": FIXTURE_REPRODUCE_QUERY,
            "gold_ticket_ids": ["ENT-22970"],
        }) + "\n",
        encoding="utf-8",
    )
    report = tmp_path / "report.json"
    code = main([
        "eval", str(golden),
        "--ks", "1,3",
        "--report", str(report),
        "--config", str(config_file),
        "--snapshot", str(snapshot),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "Retrieval" in out
    assert "baseline" in out and "graph" in out
    assert "wrote report to" in out
    doc = json.loads(report.read_text(encoding="utf-8"))
    assert doc["systems"]["graph"]["mrr"] == 1.0


def test_eval_bad_golden_exits_2(tmp_path, tickets_file, config_file, capsys):
    snapshot, _ = _build_snapshot(tmp_path, tickets_file, config_file, capsys)
    golden = tmp_path / "golden.jsonl"
    golden.write_text(
        json.dumps({"query": "x", "gold_ticket_ids": []}) + "\n", encoding="utf-8"
    )
    code = main([
        "eval", str(golden),
        "--config", str(config_file),
        "--snapshot", str(snapshot),
    ])
    assert code == 2


def test_serve_parser_wiring():
    parser = build_parser()
    args = parser.parse_args([
        "serve", "--host", "0.0.0.0", "--port", "9001", "--snapshot", "snap",
    ])
    assert args.command == "serve"
    assert args.host == "0.0.0.0"
    assert args.port == 9001
    assert str(args.snapshot) == "snap"


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2
