"""Query understanding: entity map and intent set extraction.

An adapter may do the parsing; without one (or when it fails) a cue
lexicon maps phrases like "how to reproduce" to target sections and the
remaining clause becomes the summary entity. Ticket ids mentioned in the
query are pulled out so they can anchor plans directly.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Optional

from .adapters import (
    AdapterRequest,
    TASK_PARSE_QUERY,
    TextGenerationAdapter,
    parse_json_object,
)
from .errors import AdapterError, UnparseableQueryError
from .template import GraphTemplate

logger = logging.getLogger(__name__)

TICKET_ID_RE = re.compile(r"\b[A-Za-z][A-Za-z0-9]*-\d+\b")

# Cue phrases, longest first so span removal eats whole phrases.
_CUE_PATTERNS: list[tuple[re.Pattern, str]] = [
    (re.compile(p, re.IGNORECASE), section)
    for p, section in [
        (r"\bhow\s+(?:do|can|would|should)\s+(?:i|we|you|one)\s+reproduce\b", "steps to reproduce"),
        (r"\bhow\s+to\s+reproduce\b", "steps to reproduce"),
        (r"\bsteps\s+to\s+reproduce\b", "steps to reproduce"),
        (r"\breproduc(?:e|ing|tion)\b", "steps to reproduce"),
        (r"\brepro\b", "steps to reproduce"),
        (r"\bhow\s+(?:do|can|would|should)\s+(?:i|we|you|one)\s+(?:fix|resolve|solve)\b", "fix solution"),
        (r"\bhow\s+to\s+(?:fix|resolve|solve)\b", "fix solution"),
        (r"\bfix(?:ed|es|ing)?\b", "fix solution"),
        (r"\bresolv(?:e|ed|es|ing)\b", "fix solution"),
        (r"\bresolution\b", "fix solution"),
        (r"\bsolution\b", "fix solution"),
        (r"\bsolved?\b", "fix solution"),
        (r"\bworkaround\b", "fix solution"),
        (r"\bpriority\b", "priority"),
        (r"\bseverity\b", "priority"),
        (r"\bhow\s+urgent\b", "priority"),
        (r"\bdescri(?:be|ption|ptions)\b", "description"),
        (r"\bdetails\b", "description"),
        (r"\bexplain\b", "description"),
        (r"\bsummar(?:y|ies|ize|ise)\b", "summary"),
    ]
]

# Filler dropped from the residual clause before it becomes an entity.
_STOPWORDS = frozenset(
    """a an and are can did do does for how i in is it its me my of on or
    our please s show tell that the this to was we what when where which
    who why with you your issue issues ticket tickets bug bugs""".split()
)

_WORD_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9'/-]*")


@dataclass(frozen=True)
class QueryParse:
    """Entity map, intent set, and ticket mentions from one query."""

    entities: dict[str, str]
    intents: frozenset[str]
    raw_query: str
    ticket_mentions: tuple[str, ...] = ()


def extract_ticket_mentions(text: str) -> list[str]:
    """Tracker-style ids in order of first appearance, uppercased."""
    seen: list[str] = []
    for match in TICKET_ID_RE.finditer(text):
        tid = match.group(0).upper()
        if tid not in seen:
            seen.append(tid)
    return seen


def lexicon_parse(query: str, template: GraphTemplate) -> tuple[dict[str, str], set[str]]:
    """Deterministic cue-phrase parse.

    Returns (entities, intents). Cue phrases vote for intent sections and
    are cut out; ticket ids are cut out; the cleaned remainder, minus
    filler words, becomes the summary entity.
    """
    intents: set[str] = set()
    spans: list[tuple[int, int]] = []
    for pattern, section in _CUE_PATTERNS:
        for match in pattern.finditer(query):
            if any(match.start() < e and match.end() > s for s, e in spans):
                continue
            if template.resolve(section) is None:
                continue
            intents.add(section)
            spans.append((match.start(), match.end()))
    for match in TICKET_ID_RE.finditer(query):
        spans.append((match.start(), match.end()))

    residual_parts: list[str] = []
    cursor = 0
    for start, end in sorted(spans):
        if start > cursor:
            residual_parts.append(query[cursor:start])
        cursor = max(cursor, end)
    residual_parts.append(query[cursor:])
    residual = " ".join(residual_parts)

    words = [
        w for w in _WORD_RE.findall(residual)
        if w.lower().strip("'/-") not in _STOPWORDS
    ]
    entities: dict[str, str] = {}
    if words:
        entities["summary"] = " ".join(words)
    return entities, intents


def query_parse_prompt(template: GraphTemplate, query: str) -> str:
    names = ", ".join(template.section_names())
    return (
        "Extract search entities and target sections from this issue-tracker "
        "query. Respond with one JSON object: {\"entities\": {section: value}, "
        f"\"intents\": [section, ...]}} using only these sections: {names}.\n\n"
        + query
    )


def _parse_adapter_query(raw: str, template: GraphTemplate) -> tuple[dict[str, str], set[str]]:
    payload = parse_json_object(raw)
    entities_raw = payload.get("entities", {})
    intents_raw = payload.get("intents", [])
    if not isinstance(entities_raw, dict) or not isinstance(intents_raw, list):
        raise AdapterError("query parse payload has wrong shape")
    entities: dict[str, str] = {}
    for key, value in entities_raw.items():
        canonical = template.resolve(str(key))
        if canonical is None or not isinstance(value, str) or not value.strip():
            logger.info("dropping adapter entity %r", key)
            continue
        entities.setdefault(canonical, value.strip())
    intents: set[str] = set()
    for item in intents_raw:
        canonical = template.resolve(str(item))
        if canonical is None:
            logger.info("dropping adapter intent %r", item)
            continue
        intents.add(canonical)
    return entities, intents


def parse_query(
    query: str,
    template: GraphTemplate,
    adapter: Optional[TextGenerationAdapter] = None,
) -> QueryParse:
    """Parse one query into entities and intents.

    Raises UnparseableQueryError when neither an entity, an intent, nor a
    ticket mention can be extracted; callers fall back to flat retrieval.
    """
    if not query or not query.strip():
        raise UnparseableQueryError("empty query")

    mentions = tuple(extract_ticket_mentions(query))
    entities: dict[str, str] = {}
    intents: set[str] = set()

    if adapter is not None:
        request = AdapterRequest(
            prompt=query_parse_prompt(template, query),
            context={
                "task": TASK_PARSE_QUERY,
                "query": query,
                "sections": list(template.section_names()),
            },
        )
        try:
            entities, intents = _parse_adapter_query(adapter.complete(request), template)
        except AdapterError as exc:
            logger.warning("adapter query parse failed (%s); using lexicon", exc)
            entities, intents = {}, set()

    if not entities and not intents:
        entities, intents = lexicon_parse(query, template)

    if not entities and not intents and not mentions:
        raise UnparseableQueryError(f"no entities or intents found in {query!r}")
    return QueryParse(
        entities=entities,
        intents=frozenset(intents),
        raw_query=query,
        ticket_mentions=mentions,
    )
