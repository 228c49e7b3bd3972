from __future__ import annotations

import numpy as np
import pytest

from ticketgraph.baseline import build_baseline
from ticketgraph.builder import build_graph
from ticketgraph.corpus import FIXTURE_THETA, figure_fixture_tickets
from ticketgraph.embedding import HashEmbedder
from ticketgraph.engine import TicketGraphEngine
from ticketgraph.template import default_template


@pytest.fixture(scope="session")
def embedder() -> HashEmbedder:
    return HashEmbedder()


@pytest.fixture(scope="session")
def template():
    return default_template()


@pytest.fixture(scope="session")
def fixture_tickets():
    return figure_fixture_tickets()


@pytest.fixture(scope="session")
def fixture_build(fixture_tickets, embedder):
    """Graph + index + baseline over the four-ticket walkthrough corpus."""
    graph, index, report = build_graph(
        fixture_tickets, embedder=embedder, theta=FIXTURE_THETA
    )
    baseline = build_baseline(fixture_tickets, embedder)
    return graph, index, baseline, report


@pytest.fixture(scope="session")
def fixture_engine(fixture_build, embedder) -> TicketGraphEngine:
    graph, index, baseline, _report = fixture_build
    return TicketGraphEngine(
        graph=graph, index=index, baseline=baseline, embedder=embedder
    )


class BasisEmbedder:
    """Test embedder with hand-assigned vectors.

    Texts registered via `assign` map to fixed unit vectors; anything
    else falls back to the first basis vector. Lets a test pin exact
    cosine values without reverse-engineering token hashes.
    """

    def __init__(self, dimension: int = 64):
        self.dimension = dimension
        self.fingerprint = f"basis-test-d{dimension}"
        self._table: dict[str, np.ndarray] = {}

    def assign(self, text: str, vector) -> None:
        arr = np.asarray(vector, dtype=np.float64)
        assert arr.shape[0] <= self.dimension
        padded = np.zeros(self.dimension, dtype=np.float64)
        padded[: arr.shape[0]] = arr
        norm = float(np.linalg.norm(padded))
        assert norm > 0
        self._table[text] = padded / norm

    def embed(self, text: str) -> np.ndarray:
        vec = self._table.get(text)
        if vec is not None:
            return vec.copy()
        out = np.zeros(self.dimension, dtype=np.float64)
        out[0] = 1.0
        return out


@pytest.fixture()
def basis_embedder() -> BasisEmbedder:
    return BasisEmbedder()
