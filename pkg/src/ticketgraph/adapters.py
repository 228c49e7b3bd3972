"""Text-generation adapter contract plus deterministic stubs.

Adapters answer a prompt with plain text. Structured tasks (section maps,
query parses, plans) encode their expectations in the prompt and parse the
returned text as JSON; callers validate and fall back when the adapter
fails or produces something unusable. Adapter failures are signalled with
AdapterError and are never fatal to the pipeline.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import requests

from .errors import AdapterError

logger = logging.getLogger(__name__)

# Task tags carried in AdapterRequest.context["task"].
TASK_PARSE_SECTIONS = "parse_sections"
TASK_PARSE_QUERY = "parse_query"
TASK_PLAN = "plan_subgraph"
TASK_COMPOSE = "compose_answer"


@dataclass(frozen=True)
class AdapterRequest:
    """One generation call: instruction text plus structured context."""

    prompt: str
    context: dict = field(default_factory=dict)

    @property
    def task(self) -> str:
        return str(self.context.get("task", ""))


class TextGenerationAdapter:
    """Contract: `complete(request) -> str`, deterministic stubs included.

    Implementations must either be safe to call concurrently or set
    `single_flight = True`, in which case the engine serializes calls.
    """

    single_flight = False
    fingerprint = "adapter"

    def complete(self, request: AdapterRequest) -> str:
        raise NotImplementedError


class CallableAdapter(TextGenerationAdapter):
    """Wraps a plain function; handy for scripted test stubs."""

    def __init__(self, fn: Callable[[AdapterRequest], str], fingerprint: str = "callable"):
        self._fn = fn
        self.fingerprint = fingerprint

    def complete(self, request: AdapterRequest) -> str:
        return self._fn(request)


class FailingAdapter(TextGenerationAdapter):
    """Always raises; exercises every fallback path."""

    fingerprint = "failing"

    def complete(self, request: AdapterRequest) -> str:
        raise AdapterError("adapter configured to fail")


class StubAdapter(TextGenerationAdapter):
    """Deterministic offline adapter.

    Produces well-formed JSON for each task by delegating to the same
    deterministic routines the engine uses when no adapter is present, so
    the full adapter -> validate -> accept path runs without any external
    service. Task handlers are injected to avoid circular imports.
    """

    fingerprint = "stub-v1"

    def __init__(self) -> None:
        self._handlers: dict[str, Callable[[AdapterRequest], object]] = {}

    def register(self, task: str, handler: Callable[[AdapterRequest], object]) -> None:
        self._handlers[task] = handler

    def complete(self, request: AdapterRequest) -> str:
        handler = self._handlers.get(request.task)
        if handler is None:
            raise AdapterError(f"stub adapter has no handler for task {request.task!r}")
        result = handler(request)
        if isinstance(result, str):
            return result
        return json.dumps(result, sort_keys=True)


class HttpAdapter(TextGenerationAdapter):
    """Remote adapter: POST {"prompt", "context"} and read {"text"}.

    Timeouts and transport errors raise AdapterError after the configured
    retries; the engine treats that as a fallback trigger, not a crash.
    """

    def __init__(
        self,
        url: str,
        timeout_s: float = 10.0,
        retries: int = 1,
        api_token: Optional[str] = None,
        session: Optional[requests.Session] = None,
    ):
        self.url = url
        self.timeout_s = timeout_s
        self.retries = retries
        self.api_token = api_token
        self._session = session or requests.Session()
        self.fingerprint = f"http:{url}"

    def complete(self, request: AdapterRequest) -> str:
        payload = {"prompt": request.prompt, "context": request.context}
        headers = {}
        if self.api_token:
            headers["Authorization"] = f"Bearer {self.api_token}"
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                response = self._session.post(
                    self.url, json=payload, headers=headers, timeout=self.timeout_s
                )
                response.raise_for_status()
                body = response.json()
                if not isinstance(body, dict) or "text" not in body:
                    raise AdapterError(f"adapter response missing 'text': {body!r}")
                return str(body["text"])
            except AdapterError:
                raise
            except Exception as exc:  # transport, timeout, JSON decode
                last_error = exc
                logger.warning("adapter call failed (attempt %d): %s", attempt + 1, exc)
                if attempt < self.retries:
                    time.sleep(min(0.2 * (attempt + 1), 1.0))
        raise AdapterError(f"adapter unreachable after {self.retries + 1} attempts: {last_error}")


def parse_json_object(text: str) -> dict:
    """Parse adapter output that ought to be a JSON object.

    Tolerates surrounding prose by trying the outermost braces before
    giving up with AdapterError.
    """
    candidate = text.strip()
    attempts = [candidate]
    start, end = candidate.find("{"), candidate.rfind("}")
    if start != -1 and end > start:
        attempts.append(candidate[start:end + 1])
    for attempt in attempts:
        try:
            value = json.loads(attempt)
        except json.JSONDecodeError:
            continue
        if isinstance(value, dict):
            return value
    raise AdapterError(f"adapter output is not a JSON object: {text[:200]!r}")
