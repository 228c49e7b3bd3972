"""Knowledge-graph retrieval and question answering over tracker tickets.

Tickets parse into section trees, trees connect through explicit tracker
links and implicit title similarity, and queries run as structured
traversal plans over the resulting graph, with flat chunk retrieval as
the control system and online fallback.
"""

from .adapters import (
    AdapterRequest,
    CallableAdapter,
    FailingAdapter,
    HttpAdapter,
    StubAdapter,
    TextGenerationAdapter,
)
from .baseline import (
    BaselineHit,
    BaselineIndex,
    build_baseline,
    load_baseline,
    retrieve_baseline,
    save_baseline,
)
from .builder import BuildReport, build_explicit_edges, build_graph, build_implicit_edges
from .config import AppConfig, load_config, make_adapter, make_embedder
from .embedding import Chunk, Embedder, HashEmbedder, chunk_text, cosine, hash_embed
from .engine import Answer, AnswerDetail, TicketGraphEngine
from .errors import (
    AdapterError,
    ConfigurationError,
    NotFoundError,
    PlanError,
    SnapshotError,
    TicketGraphError,
    UnparseableQueryError,
    ValidationError,
)
from .evaluation import EvalOutcome, EvalRecord, MetricReport, read_golden_jsonl, run_eval
from .index import VectorEntry, VectorIndex, build_index, load_index, save_index, search
from .metrics import bleu, meteor_simple, mrr, ndcg_at_k, recall_at_k, rouge_l
from .model import (
    InterTicketEdge,
    KnowledgeGraph,
    SectionNode,
    TicketTree,
    neighbors,
    validate_graph,
)
from .parsing import (
    ParseOutcome,
    RawTicket,
    parse_ticket,
    read_tickets_jsonl,
    rule_parse,
    write_tickets_jsonl,
)
from .planning import GraphQueryPlan, execute_plan, plan_subgraph_query, render_plan
from .querying import QueryParse, parse_query
from .scoring import TicketScore, score_tickets
from .service import create_app, load_engine
from .snapshot import load_snapshot, save_snapshot
from .stubs import build_stub_adapter
from .template import GraphTemplate, SectionSpec, default_template

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "AdapterRequest",
    "Answer",
    "AnswerDetail",
    "AppConfig",
    "BaselineHit",
    "BaselineIndex",
    "BuildReport",
    "CallableAdapter",
    "Chunk",
    "ConfigurationError",
    "Embedder",
    "EvalOutcome",
    "EvalRecord",
    "FailingAdapter",
    "GraphQueryPlan",
    "GraphTemplate",
    "HashEmbedder",
    "HttpAdapter",
    "InterTicketEdge",
    "KnowledgeGraph",
    "MetricReport",
    "NotFoundError",
    "ParseOutcome",
    "PlanError",
    "QueryParse",
    "RawTicket",
    "SectionNode",
    "SectionSpec",
    "SnapshotError",
    "StubAdapter",
    "TextGenerationAdapter",
    "TicketGraphEngine",
    "TicketGraphError",
    "TicketScore",
    "TicketTree",
    "UnparseableQueryError",
    "ValidationError",
    "VectorEntry",
    "VectorIndex",
    "bleu",
    "build_baseline",
    "build_explicit_edges",
    "build_graph",
    "build_implicit_edges",
    "build_index",
    "build_stub_adapter",
    "chunk_text",
    "cosine",
    "create_app",
    "default_template",
    "execute_plan",
    "hash_embed",
    "load_baseline",
    "load_config",
    "load_engine",
    "load_index",
    "load_snapshot",
    "make_adapter",
    "make_embedder",
    "meteor_simple",
    "mrr",
    "ndcg_at_k",
    "neighbors",
    "parse_query",
    "parse_ticket",
    "plan_subgraph_query",
    "read_golden_jsonl",
    "read_tickets_jsonl",
    "recall_at_k",
    "render_plan",
    "retrieve_baseline",
    "rouge_l",
    "rule_parse",
    "run_eval",
    "save_baseline",
    "save_index",
    "save_snapshot",
    "score_tickets",
    "search",
    "validate_graph",
    "write_tickets_jsonl",
]
