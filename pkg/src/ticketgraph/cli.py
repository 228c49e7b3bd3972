"""Command-line entry points: ingest, build, query, eval, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .baseline import build_baseline
from .builder import build_graph
from .config import AppConfig, load_config, make_adapter, make_embedder
from .errors import TicketGraphError
from .evaluation import read_golden_jsonl, run_eval
from .parsing import read_tickets_jsonl, write_tickets_jsonl
from .service import create_app, detail_to_payload, load_engine
from .snapshot import save_snapshot
from .template import default_template


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", type=Path, default=None, help="YAML config file"
    )
    parser.add_argument(
        "--snapshot", type=Path, default=None,
        help="snapshot directory (overrides config)",
    )


def _config_for(args: argparse.Namespace) -> AppConfig:
    config = load_config(args.config)
    if getattr(args, "snapshot", None) is not None:
        config.snapshot_dir = str(args.snapshot)
    return config


def cmd_ingest(args: argparse.Namespace) -> int:
    tickets = read_tickets_jsonl(args.input)
    print(f"validated {len(tickets)} tickets from {args.input}")
    if args.output is not None:
        write_tickets_jsonl(args.output, tickets)
        print(f"wrote normalized file to {args.output}")
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    config = _config_for(args)
    tickets = read_tickets_jsonl(args.input)
    template = default_template()
    embedder = make_embedder(config)
    adapter = make_adapter(config, template)
    graph, index, report = build_graph(
        tickets,
        template=template,
        embedder=embedder,
        adapter=adapter,
        theta=config.theta,
        top_m=config.top_m,
        max_chunk_tokens=config.max_chunk_tokens,
        chunk_overlap=config.chunk_overlap,
    )
    baseline = build_baseline(
        tickets, embedder,
        max_chunk_tokens=config.max_chunk_tokens,
        chunk_overlap=config.chunk_overlap,
    )
    version = save_snapshot(Path(config.snapshot_dir), graph, index, baseline)
    print(
        f"built snapshot {version} at {config.snapshot_dir}: "
        f"{report.ticket_count} tickets, {report.explicit_edge_count} explicit edges, "
        f"{report.implicit_edge_count} implicit pairs, {len(index.entries)} vectors"
    )
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    config = _config_for(args)
    engine, _version = load_engine(config)
    detail = engine.answer_detailed(args.text)
    payload = detail_to_payload(args.text, detail)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    print(f"mode: {payload['mode']}")
    print("answer:")
    print(payload["answer"])
    if payload["provenance"]:
        cited = ", ".join(f"{tid}/{section}" for tid, section in payload["provenance"])
        print(f"provenance: {cited}")
    if payload["plan"]:
        print("plan:")
        print(payload["plan"])
    if payload["fallback_reason"]:
        print(f"fallback reason: {payload['fallback_reason']}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = _config_for(args)
    engine, _version = load_engine(config)
    golden = read_golden_jsonl(args.golden)
    ks = [int(k) for k in args.ks.split(",") if k.strip()]
    outcome = run_eval(engine, golden, ks=ks)
    print(outcome.table)
    if args.report is not None:
        Path(args.report).write_text(outcome.to_json(), encoding="utf-8")
        print(f"\nwrote report to {args.report}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = _config_for(args)
    if args.host is not None:
        config.listen_host = args.host
    if args.port is not None:
        config.listen_port = args.port
    # Fail fast on a broken snapshot or fingerprint mismatch, matching the
    # CLI contract; probes-only deployments can still start explicitly
    # against a missing snapshot via create_app.
    engine, version = load_engine(config)
    app = create_app(config, engine=engine, snapshot_version=version)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ticketgraph",
        description="Knowledge-graph retrieval and QA over issue-tracker tickets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate and normalize a ticket JSONL file")
    p_ingest.add_argument("input", type=Path)
    p_ingest.add_argument("-o", "--output", type=Path, default=None)
    p_ingest.set_defaults(fn=cmd_ingest)

    p_build = sub.add_parser("build", help="parse tickets and write a graph snapshot")
    p_build.add_argument("input", type=Path)
    _add_common(p_build)
    p_build.set_defaults(fn=cmd_build)

    p_query = sub.add_parser("query", help="answer one query against a snapshot")
    p_query.add_argument("text")
    p_query.add_argument("--json", action="store_true", help="machine-readable output")
    _add_common(p_query)
    p_query.set_defaults(fn=cmd_query)

    p_eval = sub.add_parser("eval", help="run the golden-dataset evaluation")
    p_eval.add_argument("golden", type=Path)
    p_eval.add_argument("--ks", default="1,3", help="comma-separated cutoffs")
    p_eval.add_argument("--report", type=Path, default=None, help="write JSON report here")
    _add_common(p_eval)
    p_eval.set_defaults(fn=cmd_eval)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    _add_common(p_serve)
    p_serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except TicketGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
