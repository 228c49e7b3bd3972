"""Deterministic fixture and corpus generators.

Everything here is seed-driven and pure so tests, demos, and the docs
all see identical data: the four-ticket walkthrough fixture, random
synthetic corpora for oracle comparisons, and the adversarial long-body
corpus where flat chunking loses the fix text.
"""

from __future__ import annotations

import random

from .evaluation import EvalRecord
from .parsing import RawTicket

# Threshold used when building the walkthrough fixture: the two intended
# implicit pairs sit well above it, every other pair well below.
FIXTURE_THETA = 0.55

FIXTURE_REPRODUCE_QUERY = "how to reproduce ENT-22970's issue"


def figure_fixture_tickets() -> list[RawTicket]:
    """Four tickets arranged like the walkthrough example.

    ENT-22970 explicitly clones PORT-133061; its title is similar to
    ENT-1744 and ENT-3547 so both become implicit neighbors, while the
    PORT ticket's title shares no vocabulary at all.
    """
    return [
        RawTicket(
            ticket_id="ENT-22970",
            title="csv upload error in updating user email",
            body=(
                "Priority: Major\n"
                "\n"
                "Description: Upload of a member csv fails while updating user "
                "email addresses. The import job aborts with a validation error "
                "on the email column.\n"
                "\n"
                "Steps To Reproduce: Log in as an administrator. Open the bulk "
                "update console. Upload a csv containing an updated email for an "
                "existing user. Submit the form and watch the import fail.\n"
                "\n"
                "Fix Solution: Normalize header casing before validation and "
                "re-run the upload with the patched importer"
            ),
            link_fields={"clone": ("PORT-133061",)},
        ),
        RawTicket(
            ticket_id="ENT-1744",
            title="csv upload error when adding user profile",
            body=(
                "Priority: Minor\n"
                "\n"
                "Description: Adding a new profile through csv import raises an "
                "upload error before any rows are written.\n"
                "\n"
                "Fix Solution: Pad missing optional columns with empty strings "
                "during preprocessing"
            ),
        ),
        RawTicket(
            ticket_id="ENT-3547",
            title="error in updating user email preferences",
            body=(
                "Description: Saving notification preferences fails when the "
                "user email was changed in the same session.\n"
                "\n"
                "Steps To Reproduce: Change the account email. Without reloading, "
                "toggle any notification preference and save.\n"
                "\n"
                "Fix Solution: Invalidate the cached profile after email updates"
            ),
        ),
        RawTicket(
            ticket_id="PORT-133061",
            title="bulk account import failure on partner portal",
            body=(
                "Priority: Major\n"
                "\n"
                "Description: The partner portal rejects bulk account imports "
                "with a generic failure banner.\n"
                "\n"
                "Fix Solution: Normalize header casing before validation and "
                "re-run the upload with the patched importer"
            ),
        ),
    ]


_SYNTH_SECTIONS = ("description", "steps to reproduce", "fix solution")


def synthetic_corpus(
    n: int,
    seed: int,
    vocab: int = 400,
    long_section_every: int = 10,
) -> list[RawTicket]:
    """Random tickets with well-formed section markers.

    Every long_section_every-th ticket gets a description longer than one
    chunk window so chunk aggregation paths get exercised.
    """
    rng = random.Random(seed)

    def words(count: int) -> str:
        return " ".join(f"tok{rng.randrange(vocab)}" for _ in range(count))

    tickets: list[RawTicket] = []
    for i in range(n):
        parts: list[str] = []
        for section in _SYNTH_SECTIONS:
            if rng.random() < 0.15:
                continue
            length = rng.randint(5, 30)
            if section == "description" and long_section_every and i % long_section_every == 5:
                length = rng.randint(300, 600)
            label = section.title()
            parts.append(f"{label}: {words(length)}")
        if rng.random() < 0.5:
            parts.append(f"Priority: {rng.choice(['Blocker', 'Major', 'Minor'])}")
        tickets.append(
            RawTicket(
                ticket_id=f"SYN-{i:04d}",
                title=words(rng.randint(3, 8)),
                body="\n".join(parts),
            )
        )
    return tickets


def random_entity_maps(
    count: int,
    seed: int,
    vocab: int = 400,
    sections: tuple[str, ...] = ("summary",) + _SYNTH_SECTIONS,
) -> list[dict[str, str]]:
    """Random non-empty entity maps over the synthetic vocabulary."""
    rng = random.Random(seed)
    maps: list[dict[str, str]] = []
    for _ in range(count):
        chosen = rng.sample(sections, rng.randint(1, len(sections)))
        maps.append(
            {
                section: " ".join(
                    f"tok{rng.randrange(vocab)}" for _ in range(rng.randint(1, 6))
                )
                for section in chosen
            }
        )
    return maps


_TOPIC_SYSTEMS = [
    "ingestion", "billing", "checkout", "notification", "provisioning",
    "replication", "archival", "telemetry", "onboarding", "indexing",
]
_TOPIC_PARTS = [
    "pipeline", "scheduler", "gateway", "cache", "ledger", "queue",
]
_TOPIC_FAULTS = [
    "corruption", "stall", "regression", "leak", "drift",
]

_FILLER_WORDS = [
    "upstream", "service", "logs", "show", "repeated", "retries", "against",
    "shard", "replica", "during", "peak", "traffic", "window", "metrics",
    "dashboard", "confirms", "elevated", "latency", "across", "partitions",
    "operators", "observed", "sustained", "backlog", "growth", "while",
    "compaction", "paused", "deployment", "rollout", "completed", "without",
    "alerts", "until", "nightly", "batch", "started", "consuming", "events",
]


def _topic_triples(n: int, rng: random.Random) -> list[tuple[str, str, str]]:
    combos = [
        (a, b, c)
        for a in _TOPIC_SYSTEMS
        for b in _TOPIC_PARTS
        for c in _TOPIC_FAULTS
    ]
    rng.shuffle(combos)
    return combos[:n]


def adversarial_corpus(
    n: int = 30,
    seed: int = 7,
    body_tokens: int = 650,
    cross_mentions: int = 6,
) -> tuple[list[RawTicket], list[EvalRecord]]:
    """Long tickets whose fix text lies beyond the first chunk window.

    Each ticket's description opens with its own topic once, then buries
    everything under filler; the next ticket's topic is woven into the
    opening lines `cross_mentions` times, so flat chunk retrieval keeps
    pulling up the wrong ticket's first chunk. Titles stay clean, which
    is exactly what summary-node scoring needs.
    """
    rng = random.Random(seed)
    topics = _topic_triples(n, rng)
    tickets: list[RawTicket] = []
    records: list[EvalRecord] = []

    for i, topic in enumerate(topics):
        own = " ".join(topic)
        neighbor = " ".join(topics[(i + 1) % n])
        tid = f"ADV-{i:03d}"

        decoy = " ".join(
            f"cross reference {neighbor} incident" for _ in range(cross_mentions)
        )
        filler_len = max(body_tokens - 60, 50)
        filler = " ".join(
            rng.choice(_FILLER_WORDS) for _ in range(filler_len)
        )
        description = (
            f"The {own} was first reported by the oncall rotation. "
            f"{decoy}. {filler}"
        )
        steps = (
            "Enable verbose tracing, replay the captured batch, and wait for "
            "the worker heartbeat to stop."
        )
        fix = (
            f"Restart every {topic[1]} worker assigned to {topic[0]}, purge "
            f"its staging directory, and replay offsets once no {topic[2]} "
            "markers remain"
        )
        body = (
            f"Description: {description}\n"
            f"Steps To Reproduce: {steps}\n"
            f"Fix Solution: {fix}"
        )
        tickets.append(
            RawTicket(
                ticket_id=tid,
                title=f"{own} in production",
                body=body,
            )
        )
        records.append(
            EvalRecord(
                query_id=f"q{i:03d}",
                query=f"how do I resolve the {own}?",
                gold_ticket_ids=frozenset({tid}),
                gold_answer=fix,
            )
        )
    return tickets, records
