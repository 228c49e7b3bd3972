from __future__ import annotations

import pytest

from ticketgraph.errors import ValidationError
from ticketgraph.template import (
    CANONICAL_SECTIONS,
    GraphTemplate,
    ROOT_SECTION,
    SectionSpec,
    default_template,
    normalize_section_name,
    relation_label,
    section_slug,
    template_from_yaml,
    template_to_yaml,
)


def test_default_template_covers_canonical_sections():
    template = default_template()
    names = template.section_names()
    for section in CANONICAL_SECTIONS:
        assert section in names


def test_normalize_section_name_variants():
    assert normalize_section_name("Steps To Reproduce") == "steps to reproduce"
    assert normalize_section_name("steps_to_reproduce") == "steps to reproduce"
    assert normalize_section_name("  Fix-Solution ") == "fix solution"
    assert normalize_section_name("summary") == "summary"


def test_relation_labels_and_slugs():
    assert relation_label("steps to reproduce") == "HAS_STEPS_TO_REPRODUCE"
    assert relation_label("summary") == "HAS_SUMMARY"
    assert section_slug("fix solution") == "fix_solution"


def test_alias_resolution():
    template = default_template()
    assert template.resolve("fix") == "fix solution"
    assert template.resolve("Solution") == "fix solution"
    assert template.resolve("how to reproduce") == "steps to reproduce"
    assert template.resolve("details") == "description"
    assert template.resolve("issue summary") == "summary"
    assert template.resolve("no such section") is None
    # Canonical names resolve to themselves even if an alias collides.
    for name in template.section_names():
        assert template.resolve(name) == name


def test_path_to_includes_target():
    template = default_template()
    assert template.path_to("summary") == ("summary",)
    assert template.path_to("steps to reproduce") == (
        "description",
        "steps to reproduce",
    )
    assert template.relation_path_to("steps to reproduce") == (
        "HAS_DESCRIPTION",
        "HAS_STEPS_TO_REPRODUCE",
    )


def test_relation_vocabulary_matches_sections():
    template = default_template()
    vocab = template.relation_vocabulary()
    assert "HAS_FIX_SOLUTION" in vocab
    assert len(vocab) == len(template.section_names())


def test_rule_and_generative_partition():
    template = default_template()
    rule_names = {s.name for s in template.rule_sections()}
    gen_names = {s.name for s in template.generative_sections()}
    assert rule_names == {"priority", "code"}
    assert rule_names.isdisjoint(gen_names)
    assert rule_names | gen_names == set(template.section_names())


def test_embeddable_excludes_rule_payload_sections():
    template = default_template()
    embeddable = set(template.embeddable_sections())
    assert "priority" not in embeddable
    assert "code" not in embeddable
    assert "summary" in embeddable


def test_template_rejects_missing_canonical_section():
    with pytest.raises(ValidationError):
        GraphTemplate(sections=(SectionSpec(name="summary"),))


def test_template_rejects_duplicate_and_reserved_names():
    specs = tuple(SectionSpec(name=n) for n in CANONICAL_SECTIONS)
    with pytest.raises(ValidationError):
        GraphTemplate(sections=specs + (SectionSpec(name="summary"),))
    with pytest.raises(ValidationError):
        GraphTemplate(sections=specs + (SectionSpec(name=ROOT_SECTION),))


def test_template_rejects_unknown_parent():
    specs = [SectionSpec(name=n) for n in CANONICAL_SECTIONS]
    specs[1] = SectionSpec(name="description", parent="nowhere")
    with pytest.raises(ValidationError):
        GraphTemplate(sections=tuple(specs))


def test_template_rejects_non_canonical_spelling():
    specs = [SectionSpec(name=n) for n in CANONICAL_SECTIONS]
    specs[0] = SectionSpec(name="Summary")
    with pytest.raises(ValidationError):
        GraphTemplate(sections=tuple(specs))


def test_rule_extraction_requires_descriptor():
    with pytest.raises(ValidationError):
        SectionSpec(name="priority", extraction="rule")
    with pytest.raises(ValidationError):
        SectionSpec(name="priority", extraction="weird")


def test_yaml_round_trip_is_stable():
    template = default_template()
    text = template_to_yaml(template)
    again = template_from_yaml(text)
    assert again == template
    assert template_to_yaml(again) == text


def test_yaml_rejects_non_mapping():
    with pytest.raises(ValidationError):
        template_from_yaml("- just\n- a\n- list\n")
