"""Restricted-access interface over a simulated graph.

A walker only learns about the graph by querying a node id, which reveals
that node's neighbor list and attributes.  Answers are cached locally, so
only the first query for each node counts toward cost and budget.
"""
from __future__ import annotations

import operator
import time
from typing import Any, Mapping

from .graph import Graph


class BudgetExhausted(RuntimeError):
    """The next uncached query would exceed the session budget."""


class UnknownNode(KeyError):
    pass


class NotQueried(KeyError):
    """Information about a node was requested before the node was queried."""


class AccessSession:
    """Query gateway with an unbounded local cache and an optional budget.

    ``delay`` simulates per-request latency (seconds, charged only on cache
    misses); it is off by default.
    """

    def __init__(self, graph: Graph, budget: int | None = None, delay: float = 0.0):
        if budget is not None and budget < 1:
            raise ValueError("budget must be a positive integer")
        self._graph = graph
        self._cache: dict[int, tuple[tuple[int, ...], Mapping[str, Any]]] = {}
        self.budget = budget
        self.delay = delay

    def query(self, v: int) -> tuple[tuple[int, ...], Mapping[str, Any]]:
        hit = self._cache.get(v)
        if hit is not None:
            return hit
        try:
            v = operator.index(v)
        except TypeError:
            raise UnknownNode(v) from None
        if not 0 <= v < self._graph.n_nodes:
            raise UnknownNode(v)
        if self.budget is not None and len(self._cache) >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} unique queries reached")
        if self.delay:
            time.sleep(self.delay)
        g = self._graph
        answer = (g.neighbors(v), g.attributes[v] if g.attributes else {})
        self._cache[v] = answer
        return answer

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.query(v)[0]

    def attributes(self, v: int) -> Mapping[str, Any]:
        return self.query(v)[1]

    @property
    def unique_query_count(self) -> int:
        return len(self._cache)

    def is_cached(self, v: int) -> bool:
        return v in self._cache

    def degree(self, v: int) -> int:
        """Degree of an already-queried node; never issues a query."""
        try:
            return len(self._cache[v][0])
        except KeyError:
            raise NotQueried(v) from None

    def label(self, v: int) -> str:
        """Original identifier of ``v`` (an id, not topology, so no query)."""
        return self._graph.labels[v]


def unique_query_count(session: AccessSession) -> int:
    return session.unique_query_count
