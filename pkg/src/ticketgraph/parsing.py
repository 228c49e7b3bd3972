"""Raw ticket ingestion and hybrid rule/generative parsing into section trees.

Rule-extracted sections (field prefixes, fenced code) are found first and
removed from the body; the residual text goes to the generation adapter,
or to a deterministic heading-based segmenter when no adapter is available
or the adapter fails. Parsing is lossless for rule sections and fully
deterministic given a deterministic adapter.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .adapters import (
    AdapterRequest,
    TASK_PARSE_SECTIONS,
    TextGenerationAdapter,
    parse_json_object,
)
from .errors import AdapterError, ValidationError
from .model import NodeId, SectionNode, TicketTree
from .template import GraphTemplate, ROOT_SECTION, relation_label

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RawTicket:
    """One ticket as exported from the tracker.

    link_fields maps a relation label ("clone", "caused_by", ...) to the
    ticket ids it references.
    """

    ticket_id: str
    title: str = ""
    body: str = ""
    link_fields: dict[str, tuple[str, ...]] = field(default_factory=dict)


@dataclass
class ParseOutcome:
    """A parsed tree plus which stage produced each section.

    rule_covered and generative_covered list body-extracted sections and
    are disjoint; a summary synthesized from the title belongs to neither.
    """

    tree: TicketTree
    rule_covered: list[str]
    generative_covered: list[str]
    warnings: list[str]


@dataclass(frozen=True)
class _RuleMatch:
    section: str
    text: str
    span: tuple[int, int]


def _field_prefix_matches(body: str, section: str, marker: str) -> list[_RuleMatch]:
    pattern = re.compile(
        r"^[ \t]*" + re.escape(marker) + r"[ \t]*:[ \t]*(?P<value>.*?)[ \t]*$",
        re.IGNORECASE | re.MULTILINE,
    )
    return [
        _RuleMatch(section=section, text=m.group("value"), span=m.span())
        for m in pattern.finditer(body)
    ]


def _fenced_block_matches(
    body: str, section: str, marker: str, warnings: list[str]
) -> list[_RuleMatch]:
    matches: list[_RuleMatch] = []
    fence = re.compile(
        r"^[ \t]*" + re.escape(marker) + r"[^\n]*$", re.MULTILINE
    )
    fences = list(fence.finditer(body))
    if len(fences) % 2 == 1:
        warnings.append(f"unclosed {marker!r} fence ignored")
        fences = fences[:-1]
    for opener, closer in zip(fences[0::2], fences[1::2]):
        content_start = opener.end() + 1  # skip the newline after the opener
        content = body[content_start:closer.start()]
        if content.endswith("\n"):
            content = content[:-1]
        matches.append(
            _RuleMatch(section=section, text=content, span=(opener.start(), closer.end()))
        )
    return matches


def _scan_rules(
    body: str, template: GraphTemplate
) -> tuple[dict[str, str], list[tuple[int, int]], list[str]]:
    warnings: list[str] = []
    per_section: dict[str, list[_RuleMatch]] = {}
    spans: list[tuple[int, int]] = []
    for spec in template.rule_sections():
        rule = spec.rule
        assert rule is not None
        if rule.kind == "field-prefix":
            found = _field_prefix_matches(body, spec.name, rule.marker)
        else:
            found = _fenced_block_matches(body, spec.name, rule.marker, warnings)
        if found:
            per_section[spec.name] = found
            spans.extend(m.span for m in found)
    sections = {
        name: "\n\n".join(m.text for m in matches)
        for name, matches in per_section.items()
    }
    return sections, spans, warnings


def rule_parse(ticket: RawTicket, template: GraphTemplate) -> dict[str, str]:
    """Extract rule-described sections from the ticket body.

    Field-prefix sections capture the value after "<marker>:"; fenced
    sections capture block contents, multiple blocks concatenated in
    order. Sections with no match are absent from the result.
    """
    sections, _spans, _warnings = _scan_rules(ticket.body, template)
    return sections


def strip_spans(text: str, spans: list[tuple[int, int]]) -> str:
    """Remove the exact matched character ranges from `text`."""
    if not spans:
        return text
    keep: list[str] = []
    cursor = 0
    for start, end in sorted(spans):
        if start > cursor:
            keep.append(text[cursor:start])
        cursor = max(cursor, end)
    keep.append(text[cursor:])
    return "".join(keep)


@dataclass(frozen=True)
class _Marker:
    position: int
    content_start: int
    section: str
    at_line_start: bool


def _find_markers(text: str, template: GraphTemplate) -> list[_Marker]:
    markers: list[_Marker] = []
    seen_positions: set[int] = set()
    aliases: list[tuple[str, str]] = []
    for spec in template.sections:
        aliases.append((spec.name, spec.name))
        for alias in spec.aliases:
            aliases.append((alias, spec.name))
    # Longest alias first so "steps to reproduce" beats "steps".
    aliases.sort(key=lambda pair: -len(pair[0]))

    for alias, section in aliases:
        escaped = re.escape(alias).replace(r"\ ", r"[ \t]+")
        # "<alias>:" anywhere, or "<alias>" alone on a line (allowing
        # markdown-style leading hashes).
        inline = re.compile(
            r"(?<![a-z0-9])" + escaped + r"[ \t]*:", re.IGNORECASE
        )
        standalone = re.compile(
            r"^[ \t]*#*[ \t]*" + escaped + r"[ \t]*$", re.IGNORECASE | re.MULTILINE
        )
        for match in inline.finditer(text):
            if match.start() in seen_positions:
                continue
            seen_positions.add(match.start())
            at_line_start = match.start() == 0 or text[match.start() - 1] == "\n"
            markers.append(
                _Marker(
                    position=match.start(),
                    content_start=match.end(),
                    section=section,
                    at_line_start=at_line_start,
                )
            )
        for match in standalone.finditer(text):
            if match.start() in seen_positions:
                continue
            seen_positions.add(match.start())
            markers.append(
                _Marker(
                    position=match.start(),
                    content_start=match.end(),
                    section=section,
                    at_line_start=True,
                )
            )
    markers.sort(key=lambda m: m.position)
    return markers


def fallback_segment(text: str, template: GraphTemplate) -> dict[str, str]:
    """Deterministic heading-based segmentation.

    Splits on template section names (or aliases) followed by ":" and on
    standalone heading lines. Leading unlabeled text becomes the
    description when no explicit description heading appears. When a
    heading is matched mid-line, the sentence terminator that introduced
    it is dropped from the preceding section's content.
    """
    markers = _find_markers(text, template)
    sections: dict[str, str] = {}

    def clip(raw: str, next_marker: Optional[_Marker]) -> str:
        content = raw.strip()
        if next_marker is not None and not next_marker.at_line_start and content.endswith("."):
            content = content[:-1].rstrip()
        return content

    leading = text[: markers[0].position] if markers else text
    leading = leading.strip()

    for i, marker in enumerate(markers):
        nxt = markers[i + 1] if i + 1 < len(markers) else None
        end = nxt.position if nxt is not None else len(text)
        content = clip(text[marker.content_start:end], nxt)
        if not content:
            continue
        if marker.section in sections:
            sections[marker.section] = sections[marker.section] + "\n\n" + content
        else:
            sections[marker.section] = content

    if leading and "description" not in sections:
        sections["description"] = leading
    return sections


def _parse_adapter_sections(
    raw: str, template: GraphTemplate, warnings: list[str]
) -> dict[str, str]:
    payload = parse_json_object(raw)
    sections: dict[str, str] = {}
    for key, value in payload.items():
        canonical = template.resolve(str(key))
        if canonical is None:
            warnings.append(f"adapter returned unknown section {key!r}; dropped")
            continue
        if not isinstance(value, str):
            warnings.append(f"adapter returned non-text value for {key!r}; dropped")
            continue
        if canonical in sections:
            warnings.append(f"adapter returned duplicate section {key!r}; keeping first")
            continue
        sections[canonical] = value
    return sections


def section_map_prompt(template: GraphTemplate, text: str) -> str:
    names = ", ".join(template.section_names())
    return (
        "Split the following issue ticket text into its sections. "
        f"Respond with a single JSON object whose keys are among: {names}. "
        "Values are the verbatim section texts. Omit sections that are absent.\n\n"
        + text
    )


def generative_parse(
    residual_text: str,
    template: GraphTemplate,
    adapter: Optional[TextGenerationAdapter],
) -> tuple[dict[str, str], list[str]]:
    """Parse the non-rule remainder of a ticket body into sections.

    Adapter output is validated against the template (unknown keys are
    dropped with a warning). Adapter absence, failure, or unusable output
    falls back to `fallback_segment`.
    """
    warnings: list[str] = []
    if not residual_text.strip():
        return {}, warnings
    if adapter is not None:
        request = AdapterRequest(
            prompt=section_map_prompt(template, residual_text),
            context={
                "task": TASK_PARSE_SECTIONS,
                "sections": list(template.section_names()),
                "text": residual_text,
            },
        )
        try:
            raw = adapter.complete(request)
            return _parse_adapter_sections(raw, template, warnings), warnings
        except AdapterError as exc:
            warnings.append(f"adapter parse failed ({exc}); using heading segmentation")
    return fallback_segment(residual_text, template), warnings


def parse_ticket(
    ticket: RawTicket,
    template: GraphTemplate,
    adapter: Optional[TextGenerationAdapter] = None,
) -> ParseOutcome:
    """Parse one raw ticket into its section tree.

    The root node carries the ticket id; the title populates "summary"
    unless the body supplies one. Each section attaches under its
    template parent when that section is present, else under its nearest
    extracted ancestor (ultimately the root).
    """
    if not ticket.ticket_id:
        raise ValidationError("ticket_id must be non-empty")

    rule_map, spans, warnings = _scan_rules(ticket.body, template)
    residual = strip_spans(ticket.body, spans)
    gen_map, gen_warnings = generative_parse(residual, template, adapter)
    warnings.extend(gen_warnings)

    for section in sorted(set(rule_map) & set(gen_map)):
        warnings.append(
            f"section {section!r} produced by both stages; keeping rule extraction"
        )
        del gen_map[section]

    sections = dict(rule_map)
    sections.update(gen_map)
    if "summary" not in sections:
        sections["summary"] = ticket.title

    tid = ticket.ticket_id
    root = SectionNode(node_id=(tid, ROOT_SECTION), text=tid, parent=None)
    nodes: dict[str, SectionNode] = {ROOT_SECTION: root}
    edges: list[tuple[NodeId, NodeId, str]] = []

    for spec in template.sections:
        if spec.name not in sections:
            continue
        parent_section = spec.parent
        while parent_section is not None and parent_section not in nodes:
            parent_section = template.get(parent_section).parent
        parent_node = nodes[parent_section] if parent_section is not None else root
        node = SectionNode(
            node_id=(tid, spec.name),
            text=sections[spec.name],
            parent=parent_node.node_id,
        )
        nodes[spec.name] = node
        edges.append((parent_node.node_id, node.node_id, relation_label(spec.name)))

    tree = TicketTree(ticket_id=tid, root=root, nodes=nodes, intra_edges=edges)
    return ParseOutcome(
        tree=tree,
        rule_covered=sorted(rule_map),
        generative_covered=sorted(gen_map),
        warnings=warnings,
    )


def read_tickets_jsonl(path: Path) -> list[RawTicket]:
    """Load an ingest file: one JSON ticket per line.

    Fields: ticket_id (required), title, body, link_fields. Duplicate or
    empty ids fail validation with the offending line number.
    """
    tickets: list[RawTicket] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise ValidationError(f"{path}:{lineno}: ticket record must be an object")
            tid = str(record.get("ticket_id", "")).strip()
            if not tid:
                raise ValidationError(f"{path}:{lineno}: ticket_id missing or empty")
            if tid in seen:
                raise ValidationError(f"{path}:{lineno}: duplicate ticket_id {tid!r}")
            seen.add(tid)
            links_raw = record.get("link_fields", {})
            if not isinstance(links_raw, dict):
                raise ValidationError(f"{path}:{lineno}: link_fields must be an object")
            link_fields = {
                str(rel): tuple(str(t) for t in targets)
                for rel, targets in links_raw.items()
            }
            tickets.append(
                RawTicket(
                    ticket_id=tid,
                    title=str(record.get("title", "")),
                    body=str(record.get("body", "")),
                    link_fields=link_fields,
                )
            )
    return tickets


def write_tickets_jsonl(path: Path, tickets: list[RawTicket]) -> None:
    """Write a normalized ingest file: sorted by id, canonical JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        for ticket in sorted(tickets, key=lambda t: t.ticket_id):
            record = {
                "ticket_id": ticket.ticket_id,
                "title": ticket.title,
                "body": ticket.body,
                "link_fields": {
                    rel: sorted(targets)
                    for rel, targets in sorted(ticket.link_fields.items())
                },
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")
