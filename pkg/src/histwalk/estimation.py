"""Point and variance estimates from walk traces.

``burnin`` always means the number of leading trace nodes that are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .walkers import Trace


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class Measure:
    """A named real-valued function of a node."""

    name: str
    fn: Callable[[int], float]

    def __call__(self, v: int) -> float:
        return self.fn(v)


def degree_measure(source) -> Measure:
    """``f(v) = degree(v)``; ``source`` is a Graph or an AccessSession (cached nodes only)."""
    return Measure("degree", source.degree)


def attribute_measure(source, name: str) -> Measure:
    """Numeric attribute ``name``; a node lacking it raises instead of counting as 0."""
    attrs: Callable[[int], Mapping[str, Any]]
    if hasattr(source, "query"):
        attrs = source.attributes
    else:
        attrs = lambda v: source.attributes[v]  # noqa: E731

    def value(v: int) -> float:
        x = attrs(v).get(name)
        if x is None:
            raise EstimationError(f"node {v} has no attribute {name!r}")
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise EstimationError(f"attribute {name!r} of node {v} is not numeric: {x!r}")
        return float(x)

    return Measure(f"attr:{name}", value)


def indicator_measure(nodes: Iterable[int], name: str = "indicator") -> Measure:
    members = frozenset(nodes)
    return Measure(name, lambda v: 1.0 if v in members else 0.0)


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    n_used: int
    burnin_discarded: int


def _nodes(trace: Trace | Sequence[int]) -> Sequence[int]:
    return trace.nodes if isinstance(trace, Trace) else trace


def _effective(trace, burnin: int) -> Sequence[int]:
    nodes = _nodes(trace)
    if burnin < 0:
        raise EstimationError("burnin must be >= 0")
    if len(nodes) <= burnin:
        raise EstimationError(f"burnin {burnin} leaves no samples from a trace of length {len(nodes)}")
    return nodes[burnin:]


def stationary_mean(trace, f: Callable[[int], float], burnin: int = 0) -> EstimateReport:
    """Plain average of ``f`` along the walk; estimates the mean under the walk's stationary law."""
    used = _effective(trace, burnin)
    values = np.fromiter((f(v) for v in used), dtype=float, count=len(used))
    return EstimateReport(float(values.mean()), len(used), burnin)


def uniform_mean(
    trace, f: Callable[[int], float], degree: Callable[[int], int], burnin: int = 0
) -> EstimateReport:
    """Degree-reweighted ratio estimator of the node-uniform mean of ``f``.

    ``sum f(X_t)/k(X_t) / sum 1/k(X_t)``; valid for walks whose stationary
    law is proportional to degree.
    """
    used = _effective(trace, burnin)
    w = 1.0 / np.fromiter((degree(v) for v in used), dtype=float, count=len(used))
    values = np.fromiter((f(v) for v in used), dtype=float, count=len(used))
    return EstimateReport(float(values @ w / w.sum()), len(used), burnin)


def empirical_distribution(traces: Iterable, n_nodes: int, burnin: int = 0) -> np.ndarray:
    """Normalized visit counts over ``0..n_nodes-1`` pooled across traces."""
    counts = np.zeros(n_nodes, dtype=np.int64)
    for tr in traces:
        nodes = _nodes(tr)[burnin:]
        counts += np.bincount(np.asarray(nodes, dtype=np.int64), minlength=n_nodes)
    total = counts.sum()
    if total < 1:
        raise EstimationError("no samples left after burn-in")
    return counts / total


def asymptotic_variance(estimates: Sequence[float], n: int) -> float:
    """``n`` times the sample variance of independent replicate estimates (finite-n V-infinity)."""
    est = np.asarray(estimates, dtype=float)
    if est.size < 2:
        raise EstimationError("need at least two replicate estimates")
    return float(n * est.var(ddof=1))
