"""Golden-dataset evaluation: retrieval and answer metrics, both systems.

The graph pipeline and the flat chunk baseline run over the identical
corpus and embedder; the report carries per-query breakdowns, aggregate
means, and a fixed-width comparison table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .baseline import retrieve_baseline
from .engine import TicketGraphEngine
from .errors import ValidationError
from .metrics import (
    bleu,
    hit_at_k,
    meteor_simple,
    ndcg_single,
    reciprocal_rank,
    rouge_l,
)

GRAPH_SYSTEM = "graph"
BASELINE_SYSTEM = "baseline"

TOKENIZATION_NOTE = "lowercase, split on non-alphanumeric runs"


@dataclass(frozen=True)
class EvalRecord:
    """One golden query: what should be retrieved and what a good answer is."""

    query: str
    gold_ticket_ids: frozenset[str]
    gold_answer: str = ""
    query_id: str = ""

    def __post_init__(self) -> None:
        if not self.query.strip():
            raise ValidationError("golden record query must be non-empty")
        if not self.gold_ticket_ids:
            raise ValidationError("golden record needs at least one gold ticket id")


@dataclass
class MetricReport:
    """Aggregate metrics for one system; every value lies in [0, 1]."""

    system: str
    mrr: float = 0.0
    recall_at: dict[int, float] = field(default_factory=dict)
    ndcg_at: dict[int, float] = field(default_factory=dict)
    bleu: float = 0.0
    rouge_l: float = 0.0
    meteor_simple: float = 0.0
    per_query: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "mrr": self.mrr,
            "recall_at": {str(k): v for k, v in sorted(self.recall_at.items())},
            "ndcg_at": {str(k): v for k, v in sorted(self.ndcg_at.items())},
            "bleu": self.bleu,
            "rouge_l": self.rouge_l,
            "meteor_simple": self.meteor_simple,
            "per_query": self.per_query,
        }


@dataclass
class EvalOutcome:
    reports: dict[str, MetricReport]
    table: str
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "systems": {name: r.to_dict() for name, r in sorted(self.reports.items())},
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def read_golden_jsonl(path: Path) -> list[EvalRecord]:
    records: list[EvalRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(raw, dict):
                raise ValidationError(f"{path}:{lineno}: record must be an object")
            try:
                records.append(
                    EvalRecord(
                        query=str(raw.get("query", "")),
                        gold_ticket_ids=frozenset(
                            str(t) for t in raw.get("gold_ticket_ids", [])
                        ),
                        gold_answer=str(raw.get("gold_answer", "")),
                        query_id=str(raw.get("query_id", f"q{lineno}")),
                    )
                )
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    return records


def write_golden_jsonl(path: Path, records: Sequence[EvalRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(
                json.dumps(
                    {
                        "query_id": record.query_id,
                        "query": record.query,
                        "gold_ticket_ids": sorted(record.gold_ticket_ids),
                        "gold_answer": record.gold_answer,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _aggregate(
    system: str,
    records: Sequence[EvalRecord],
    rankings: list[list[str]],
    answers: list[str],
    ks: Sequence[int],
) -> MetricReport:
    report = MetricReport(system=system)
    qa_bleu: list[float] = []
    qa_rouge: list[float] = []
    qa_meteor: list[float] = []
    per_k_hits: dict[int, list[float]] = {k: [] for k in ks}
    per_k_ndcg: dict[int, list[float]] = {k: [] for k in ks}
    rrs: list[float] = []

    for record, ranking, answer_text in zip(records, rankings, answers):
        gold = set(record.gold_ticket_ids)
        entry: dict = {
            "query_id": record.query_id,
            "query": record.query,
            "reciprocal_rank": reciprocal_rank(ranking, gold),
            "recall_at": {},
            "ndcg_at": {},
        }
        rrs.append(entry["reciprocal_rank"])
        for k in ks:
            hit = hit_at_k(ranking, gold, k)
            ndcg = ndcg_single(ranking, gold, k)
            per_k_hits[k].append(hit)
            per_k_ndcg[k].append(ndcg)
            entry["recall_at"][str(k)] = hit
            entry["ndcg_at"][str(k)] = ndcg
        if record.gold_answer:
            b = bleu(answer_text, record.gold_answer)
            r = rouge_l(answer_text, record.gold_answer)
            m = meteor_simple(answer_text, record.gold_answer)
            qa_bleu.append(b)
            qa_rouge.append(r)
            qa_meteor.append(m)
            entry["bleu"] = b
            entry["rouge_l"] = r
            entry["meteor_simple"] = m
        report.per_query.append(entry)

    report.mrr = _mean(rrs)
    report.recall_at = {k: _mean(per_k_hits[k]) for k in ks}
    report.ndcg_at = {k: _mean(per_k_ndcg[k]) for k in ks}
    report.bleu = _mean(qa_bleu)
    report.rouge_l = _mean(qa_rouge)
    report.meteor_simple = _mean(qa_meteor)
    return report


def render_table(reports: dict[str, MetricReport], ks: Sequence[int], qa_count: int) -> str:
    names = sorted(reports)
    width = max([len(n) for n in names] + [8])
    lines = ["Retrieval"]
    header = f"{'system':<{width}}  {'MRR':>8}"
    for k in ks:
        header += f"  {f'Recall@{k}':>9}"
    for k in ks:
        header += f"  {f'NDCG@{k}':>9}"
    lines.append(header)
    for name in names:
        report = reports[name]
        row = f"{name:<{width}}  {report.mrr:>8.4f}"
        for k in ks:
            row += f"  {report.recall_at[k]:>9.4f}"
        for k in ks:
            row += f"  {report.ndcg_at[k]:>9.4f}"
        lines.append(row)
    lines.append("")
    lines.append(f"Question answering (n={qa_count})")
    lines.append(f"{'system':<{width}}  {'BLEU':>8}  {'ROUGE-L':>9}  {'METEOR-simple':>13}")
    for name in names:
        report = reports[name]
        lines.append(
            f"{name:<{width}}  {report.bleu:>8.4f}  {report.rouge_l:>9.4f}"
            f"  {report.meteor_simple:>13.4f}"
        )
    return "\n".join(lines)


def run_eval(
    engine: TicketGraphEngine,
    golden: Sequence[EvalRecord],
    ks: Sequence[int] = (1, 3),
    systems: Sequence[str] = (GRAPH_SYSTEM, BASELINE_SYSTEM),
) -> EvalOutcome:
    """Evaluate the graph pipeline and/or baseline over a golden set.

    Gold ids must resolve against the engine's corpus. Both systems see
    identical queries; QA metrics average over records with a non-empty
    gold answer.
    """
    if not golden:
        raise ValidationError("golden set must be non-empty")
    ks = sorted(set(int(k) for k in ks))
    if any(k < 1 for k in ks):
        raise ValidationError("every k must be >= 1")
    known = set(engine.graph.trees)
    for record in golden:
        missing = record.gold_ticket_ids - known
        if missing:
            raise ValidationError(
                f"golden record {record.query_id or record.query!r} references "
                f"unknown tickets: {sorted(missing)}"
            )

    corpus_size = max(len(known), 1)
    reports: dict[str, MetricReport] = {}

    if GRAPH_SYSTEM in systems:
        rankings = []
        answers = []
        for record in golden:
            ranked = engine.rank_tickets(record.query, k=corpus_size)
            rankings.append([s.ticket_id for s in ranked])
            answers.append(engine.answer(record.query).text)
        reports[GRAPH_SYSTEM] = _aggregate(GRAPH_SYSTEM, golden, rankings, answers, ks)

    if BASELINE_SYSTEM in systems:
        rankings = []
        answers = []
        for record in golden:
            hits = retrieve_baseline(
                engine.baseline, record.query, engine.embedder, k=corpus_size
            )
            rankings.append([h.ticket_id for h in hits])
            answers.append(hits[0].chunk_text if hits else "")
        reports[BASELINE_SYSTEM] = _aggregate(
            BASELINE_SYSTEM, golden, rankings, answers, ks
        )

    qa_count = sum(1 for r in golden if r.gold_answer)
    metadata = {
        "ks": list(ks),
        "qa_record_count": qa_count,
        "record_count": len(golden),
        "corpus_tickets": len(known),
        "tokenization": TOKENIZATION_NOTE,
        "embedder_fingerprint": engine.embedder.fingerprint,
    }
    table = render_table(reports, ks, qa_count)
    return EvalOutcome(reports=reports, table=table, metadata=metadata)
