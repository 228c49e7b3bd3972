"""Canonical ticket-section schema.

The template is the single vocabulary shared by parsing, indexing, query
interpretation, and query planning: every section node, query entity, and
plan step is named by one of its canonical section names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import yaml

from .errors import ValidationError

# Sections every template must define, in canonical spelling.
CANONICAL_SECTIONS = (
    "summary",
    "description",
    "priority",
    "steps to reproduce",
    "fix solution",
)

# Section name reserved for the tree root (the ticket itself). Never a
# template section.
ROOT_SECTION = "ticket"

_WHITESPACE = re.compile(r"\s+")


def normalize_section_name(name: str) -> str:
    """Lowercase a section name, mapping underscores/hyphens to spaces.

    "Steps To Reproduce" and "steps_to_reproduce" both normalize to
    "steps to reproduce". Spaces are preserved (collapsed to single).
    """
    cleaned = name.strip().lower().replace("_", " ").replace("-", " ")
    return _WHITESPACE.sub(" ", cleaned)


def relation_label(section: str) -> str:
    """Edge label for the tree edge pointing at `section`.

    "steps to reproduce" -> "HAS_STEPS_TO_REPRODUCE".
    """
    return "HAS_" + normalize_section_name(section).upper().replace(" ", "_")


def section_slug(section: str) -> str:
    """Identifier-safe form of a section name ("fix solution" -> "fix_solution")."""
    return normalize_section_name(section).replace(" ", "_")


@dataclass(frozen=True)
class RuleDescriptor:
    """How a rule-extracted section is located in raw ticket text.

    kind "field-prefix": lines of the form "<marker>: value".
    kind "fenced-block": content between fence lines starting with `marker`.
    """

    kind: str
    marker: str

    def __post_init__(self) -> None:
        if self.kind not in ("field-prefix", "fenced-block"):
            raise ValidationError(f"unknown rule descriptor kind: {self.kind!r}")
        if not self.marker:
            raise ValidationError("rule descriptor marker must be non-empty")


@dataclass(frozen=True)
class SectionSpec:
    """One section of the canonical ticket schema.

    parent names the section under which this node hangs in the ticket
    tree; None means directly under the root. aliases are alternative
    spellings accepted from raw tickets, adapters, and queries.
    """

    name: str
    extraction: str = "generative"
    embeddable: bool = True
    parent: str | None = None
    aliases: tuple[str, ...] = ()
    rule: RuleDescriptor | None = None

    def __post_init__(self) -> None:
        if self.extraction not in ("rule", "generative"):
            raise ValidationError(
                f"section {self.name!r}: extraction must be 'rule' or 'generative'"
            )
        if self.extraction == "rule" and self.rule is None:
            raise ValidationError(
                f"section {self.name!r}: rule extraction requires a rule descriptor"
            )


@dataclass(frozen=True)
class GraphTemplate:
    """Ordered section schema plus a monotonically increasing version."""

    sections: tuple[SectionSpec, ...]
    version: int = 1

    # name -> spec, alias -> canonical name; built once since frozen.
    _by_name: dict = field(default_factory=dict, repr=False, compare=False)
    _alias_map: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_name: dict[str, SectionSpec] = {}
        alias_map: dict[str, str] = {}
        for spec in self.sections:
            name = spec.name
            if not name:
                raise ValidationError("template section names must be non-empty")
            if name != normalize_section_name(name):
                raise ValidationError(
                    f"template section {name!r} is not in canonical lowercase form"
                )
            if name == ROOT_SECTION:
                raise ValidationError(f"{ROOT_SECTION!r} is reserved for tree roots")
            if name in by_name:
                raise ValidationError(f"duplicate template section {name!r}")
            by_name[name] = spec
            alias_map[name] = name
            for alias in spec.aliases:
                alias_map.setdefault(normalize_section_name(alias), name)
        missing = [s for s in CANONICAL_SECTIONS if s not in by_name]
        if missing:
            raise ValidationError(f"template missing canonical sections: {missing}")
        for spec in self.sections:
            if spec.parent is not None and spec.parent not in by_name:
                raise ValidationError(
                    f"section {spec.name!r} names unknown parent {spec.parent!r}"
                )
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_alias_map", alias_map)

    def section_names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self.sections)

    def get(self, name: str) -> SectionSpec:
        return self._by_name[name]

    def resolve(self, name: str) -> str | None:
        """Canonical section name for `name` (alias-aware), or None."""
        return self._alias_map.get(normalize_section_name(name))

    def rule_sections(self) -> tuple[SectionSpec, ...]:
        return tuple(s for s in self.sections if s.extraction == "rule")

    def generative_sections(self) -> tuple[SectionSpec, ...]:
        return tuple(s for s in self.sections if s.extraction == "generative")

    def embeddable_sections(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.sections if s.embeddable)

    def path_to(self, section: str) -> tuple[str, ...]:
        """Chain of sections from the root down to `section`, inclusive.

        "steps to reproduce" under "description" -> ("description",
        "steps to reproduce").
        """
        chain: list[str] = []
        cursor: str | None = section
        while cursor is not None:
            if cursor in chain:
                raise ValidationError(f"section parent cycle at {cursor!r}")
            chain.append(cursor)
            cursor = self.get(cursor).parent
        return tuple(reversed(chain))

    def relation_path_to(self, section: str) -> tuple[str, ...]:
        """Relation labels from the root down to `section`."""
        return tuple(relation_label(s) for s in self.path_to(section))

    def relation_vocabulary(self) -> frozenset[str]:
        return frozenset(relation_label(s) for s in self.section_names())


def default_template(version: int = 1) -> GraphTemplate:
    """The stock support-ticket schema.

    Narrative sections nest under "description" so a traversal can walk
    root -> description -> steps/fix, mirroring how agents read tickets.
    """
    return GraphTemplate(
        version=version,
        sections=(
            SectionSpec(
                name="summary",
                aliases=("issue summary", "title"),
            ),
            SectionSpec(
                name="description",
                aliases=("issue description", "details"),
            ),
            SectionSpec(
                name="priority",
                extraction="rule",
                embeddable=False,
                rule=RuleDescriptor(kind="field-prefix", marker="priority"),
            ),
            SectionSpec(
                name="steps to reproduce",
                parent="description",
                aliases=("steps", "repro steps", "how to reproduce"),
            ),
            SectionSpec(
                name="fix solution",
                parent="description",
                aliases=("fix", "solution", "resolution", "fix version"),
            ),
            SectionSpec(
                name="code",
                extraction="rule",
                embeddable=False,
                parent="description",
                aliases=("code sample", "snippet"),
                rule=RuleDescriptor(kind="fenced-block", marker="```"),
            ),
        ),
    )


def template_to_yaml(template: GraphTemplate) -> str:
    """Stable YAML rendering; identical templates produce identical bytes."""
    doc = {
        "version": template.version,
        "sections": [
            {
                "name": s.name,
                "extraction": s.extraction,
                "embeddable": s.embeddable,
                "parent": s.parent,
                "aliases": list(s.aliases),
                "rule": None if s.rule is None else {"kind": s.rule.kind, "marker": s.rule.marker},
            }
            for s in template.sections
        ],
    }
    return yaml.safe_dump(doc, sort_keys=True, default_flow_style=False)


def template_from_yaml(text: str) -> GraphTemplate:
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict) or "sections" not in doc:
        raise ValidationError("template document must be a mapping with 'sections'")
    sections = []
    for raw in doc["sections"]:
        rule = raw.get("rule")
        sections.append(
            SectionSpec(
                name=raw["name"],
                extraction=raw.get("extraction", "generative"),
                embeddable=bool(raw.get("embeddable", True)),
                parent=raw.get("parent"),
                aliases=tuple(raw.get("aliases", ())),
                rule=None if rule is None else RuleDescriptor(kind=rule["kind"], marker=rule["marker"]),
            )
        )
    return GraphTemplate(sections=tuple(sections), version=int(doc.get("version", 1)))
