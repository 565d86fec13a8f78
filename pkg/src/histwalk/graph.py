"""Undirected graphs: loading, generators and ground-truth quantities.

Nodes are dense integers ``0..n-1``.  The original identifiers found in an
edge-list file are kept in ``Graph.labels`` so attribute files keyed by the
original ids can still be joined.
"""
from __future__ import annotations

import csv
import enum
import io
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Mapping, Sequence, TextIO

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    """Raised for invalid graph input or construction arguments."""


class ParseError(GraphError):
    def __init__(self, lineno: int, line: str, reason: str = "expected two node tokens"):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class EdgePolicy(enum.Enum):
    """How directed input lines become undirected edges."""

    EITHER = "either"  # keep u-v if u->v or v->u appears
    MUTUAL = "mutual"  # keep u-v only if both u->v and v->u appear


@dataclass(frozen=True)
class Graph:
    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]
    attributes: tuple[Mapping[str, Any], ...] = field(default=(), repr=False)
    edge_count: int = 0

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
        attributes: Sequence[Mapping[str, Any]] | None = None,
    ) -> "Graph":
        """Build a graph on nodes ``0..n-1``; self-loops and duplicates are dropped."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) outside node range 0..{n - 1}")
            if u == v:
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        m = sum(len(a) for a in adjacency) // 2
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise GraphError("labels length does not match node count")
        if attributes is None:
            attributes = [{} for _ in range(n)]
        return cls(adjacency, tuple(labels), tuple(dict(a) for a in attributes), m)

    def __len__(self) -> int:
        return len(self.adjacency)

    @property
    def n_nodes(self) -> int:
        return len(self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=len(self))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < len(self) and v in self.adjacency[u]

    def node_of(self, label: str) -> int:
        """Dense id for an original node identifier."""
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    @property
    def _label_index(self) -> dict[str, int]:
        idx = self.__dict__.get("_label_index_cache")
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_label_index_cache", idx)
        return idx

    def with_attributes(self, attributes: Sequence[Mapping[str, Any]]) -> "Graph":
        if len(attributes) != len(self):
            raise GraphError("one attribute map per node required")
        return Graph(self.adjacency, self.labels, tuple(dict(a) for a in attributes), self.edge_count)

    def is_connected(self) -> bool:
        return _components(self)[0] <= 1


def _open_text(source: str | os.PathLike | TextIO) -> tuple[TextIO, bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8"), True
    return source, False


def load_edge_list(
    source: str | os.PathLike | TextIO, mode: EdgePolicy | str = EdgePolicy.EITHER
) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are skipped.  Dense ids follow
    the sorted order of the original ids (numerically when every id is an
    integer); nodes left without any edge are not part of the graph.
    """
    mode = EdgePolicy(mode)
    fh, owned = _open_text(source)
    directed: set[tuple[str, str]] = set()
    try:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(lineno, raw.rstrip("\n"))
            a, b = parts
            if a != b:
                directed.add((a, b))
    finally:
        if owned:
            fh.close()

    if mode is EdgePolicy.MUTUAL:
        pairs = [(a, b) for a, b in directed if (b, a) in directed and a < b]
    else:
        pairs = list({(a, b) if a < b else (b, a) for a, b in directed})
    if not pairs:
        raise GraphError("edge list yields an empty graph")

    names = {x for p in pairs for x in p}
    try:
        labels = sorted(names, key=lambda x: (int(x), x))
    except ValueError:
        labels = sorted(names)
    index = {lab: i for i, lab in enumerate(labels)}
    return Graph.from_edges(len(labels), ((index[a], index[b]) for a, b in pairs), labels)


def _parse_value(text: str) -> Any:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def load_attributes(graph: Graph, source: str | os.PathLike | TextIO) -> Graph:
    """Attach per-node attributes from a CSV file keyed by original node id.

    The first column holds node ids, remaining columns are attributes.  A
    column whose non-empty cells all parse as numbers becomes numeric, any
    other column stays categorical (strings).  Empty cells are treated as
    missing.  Rows for nodes not in the graph are ignored.
    """
    fh, owned = _open_text(source)
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise GraphError("attribute file needs a header with an id column and at least one attribute")
        rows = [r for r in reader if r]
    finally:
        if owned:
            fh.close()

    names = header[1:]
    numeric = []
    for j in range(1, len(header)):
        cells = [r[j] for r in rows if j < len(r) and r[j] != ""]
        numeric.append(all(not isinstance(_parse_value(c), str) for c in cells))

    attrs = [dict(a) for a in graph.attributes] or [{} for _ in range(len(graph))]
    for r in rows:
        try:
            v = graph.node_of(r[0])
        except KeyError:
            continue
        for j, name in enumerate(names, start=1):
            if j >= len(r) or r[j] == "":
                continue
            attrs[v][name] = _parse_value(r[j]) if numeric[j - 1] else r[j]
    return graph.with_attributes(attrs)


def _components(g: Graph) -> tuple[int, np.ndarray]:
    edges = g.edges()
    n = len(g)
    if edges:
        rows, cols = np.array(edges, dtype=np.int64).T
    else:
        rows = cols = np.empty(0, dtype=np.int64)
    mat = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return connected_components(mat, directed=False)


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> Graph:
    keep = sorted(set(nodes))
    remap = {old: new for new, old in enumerate(keep)}
    edges = [(remap[u], remap[v]) for u in keep for v in g.adjacency[u] if u < v and v in remap]
    attrs = [g.attributes[u] for u in keep] if g.attributes else None
    return Graph.from_edges(len(keep), edges, [g.labels[u] for u in keep], attrs)


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component (ties: smallest minimum node id)."""
    n_comp, label = _components(g)
    if n_comp <= 1:
        return g
    sizes = np.bincount(label, minlength=n_comp)
    # components are numbered in order of their smallest node, so argmax already breaks ties correctly
    best = int(np.argmax(sizes))
    return induced_subgraph(g, np.flatnonzero(label == best).tolist())


def _complete_edges(offset: int, size: int) -> list[tuple[int, int]]:
    return [(offset + a, offset + b) for a, b in combinations(range(size), 2)]


def gen_complete(n: int) -> Graph:
    if n < 2:
        raise GraphError("complete graph needs n >= 2")
    return Graph.from_edges(n, _complete_edges(0, n))


def gen_path(n: int) -> Graph:
    if n < 2:
        raise GraphError("path needs n >= 2")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_star(leaves: int) -> Graph:
    """Node 0 is the center, ``1..leaves`` are the leaves."""
    if leaves < 1:
        raise GraphError("star needs at least one leaf")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def barbell_bridge(n1: int, n2: int) -> tuple[int, int]:
    """Bridge endpoints ``(u, w)`` of ``gen_barbell(n1, n2)``; ``u`` lies in the first clique."""
    return n1 - 1, n1


def gen_barbell(n1: int, n2: int) -> Graph:
    """Cliques K_n1 (nodes ``0..n1-1``) and K_n2 (the rest) joined by one bridge edge."""
    if n1 < 2 or n2 < 2:
        raise GraphError("barbell cliques need at least 2 nodes each")
    edges = _complete_edges(0, n1) + _complete_edges(n1, n2)
    edges.append(barbell_bridge(n1, n2))
    return Graph.from_edges(n1 + n2, edges)


def gen_clustered(sizes: Sequence[int]) -> Graph:
    """Chain of cliques; consecutive cliques share one bridge between their lowest-id nodes."""
    if not sizes:
        raise GraphError("at least one cluster size required")
    if any(s < 2 for s in sizes):
        raise GraphError("every cluster needs at least 2 nodes")
    edges: list[tuple[int, int]] = []
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int).tolist()
    for off, size in zip(starts, sizes):
        edges += _complete_edges(off, size)
    edges += list(zip(starts[:-1], starts[1:]))
    return Graph.from_edges(int(sum(sizes)), edges)


def parse_generator(spec: str) -> Graph:
    """Build a graph from ``barbell:n1,n2`` / ``clustered:s1,s2,...`` / ``complete:n`` / ``path:n`` / ``star:k``."""
    name, _, args = spec.partition(":")
    try:
        nums = [int(x) for x in args.split(",") if x.strip()]
    except ValueError:
        raise GraphError(f"bad generator arguments in {spec!r}") from None
    name = name.strip().lower()
    if name == "barbell" and len(nums) == 2:
        return gen_barbell(*nums)
    if name == "clustered" and nums:
        return gen_clustered(nums)
    if name == "complete" and len(nums) == 1:
        return gen_complete(nums[0])
    if name == "path" and len(nums) == 1:
        return gen_path(nums[0])
    if name == "star" and len(nums) == 1:
        return gen_star(nums[0])
    raise GraphError(f"unknown generator spec {spec!r}")


def true_stationary(g: Graph) -> np.ndarray:
    """Degree-proportional stationary distribution ``k_v / 2|E|``."""
    if g.edge_count < 1:
        raise GraphError("stationary distribution needs at least one edge")
    return g.degrees() / (2.0 * g.edge_count)


def edge_list_text(g: Graph) -> str:
    buf = io.StringIO()
    for u, v in g.edges():
        buf.write(f"{g.labels[u]} {g.labels[v]}\n")
    return buf.getvalue()
