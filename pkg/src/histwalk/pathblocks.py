"""Path-block decomposition of traces and circulation diagnostics.

A path block rooted on the directed edge ``u -> v`` starts at an occurrence
of ``u, v`` in the trace and runs up to (not including) the next occurrence
of ``u, v``.  Its *entry neighbor* is the node right after ``v``.  Under
CNRW the sequence of entry neighbors cycles through ``N(v)`` in random
permutations, so block counts never drift more than one apart.
"""
from __future__ import annotations

import csv
import random
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence, TextIO

from .access import AccessSession
from .graph import Graph, barbell_bridge, gen_barbell
from .walkers import GroupingStrategy, Trace, WalkerKind, make_groups, walk


@dataclass(frozen=True)
class PathBlock:
    root: tuple[int, int]
    entry: int
    nodes: tuple[int, ...]
    complete: bool


def _nodes(trace: Trace | Sequence[int]) -> Sequence[int]:
    return trace.nodes if isinstance(trace, Trace) else trace


def decompose(trace, u: int, v: int, graph: Graph | None = None) -> list[PathBlock]:
    """Split ``trace`` into consecutive blocks rooted on ``u -> v``.

    Nodes before the first ``u, v`` are not part of any block.  The last
    block is marked incomplete when the trace ends before the next ``u, v``;
    a trailing ``u, v`` with no successor yields no block at all.
    """
    if graph is not None and not graph.has_edge(u, v):
        raise ValueError(f"({u}, {v}) is not an edge of the graph")
    nodes = _nodes(trace)
    starts = [t for t in range(len(nodes) - 1) if nodes[t] == u and nodes[t + 1] == v]
    blocks = []
    for i, s in enumerate(starts):
        end = starts[i + 1] if i + 1 < len(starts) else len(nodes)
        if s + 2 >= len(nodes):
            break
        blocks.append(PathBlock((u, v), nodes[s + 2], tuple(nodes[s:end]), i + 1 < len(starts)))
    return blocks


def block_counts(
    blocks: Sequence[PathBlock], m: int, neighbors: Iterable[int] = ()
) -> dict[int, int]:
    """Entry-neighbor counts over the first ``m`` complete blocks.

    Keys cover ``neighbors`` (reported with zero counts when absent) plus
    every entry seen among ``blocks``.
    """
    complete = [b for b in blocks if b.complete]
    if m < 0 or m > len(complete):
        raise ValueError(f"M={m} exceeds the {len(complete)} complete blocks available")
    counts = {i: 0 for i in neighbors}
    for b in blocks:
        counts.setdefault(b.entry, 0)
    for b in complete[:m]:
        counts[b.entry] += 1
    return counts


def write_blocks_csv(blocks: Sequence[PathBlock], labels: Sequence[str], fh: TextIO) -> None:
    writer = csv.writer(fh)
    writer.writerow(["block_index", "entry_neighbor", "length"])
    for i, b in enumerate(blocks):
        writer.writerow([i, labels[b.entry], len(b.nodes)])


# ---------------------------------------------------------------------------
# circulation checks over whole traces

def successors_by_edge(trace) -> dict[tuple[int, int], list[int]]:
    """For each directed pair ``(X_{t-1}, X_t)`` the successors ``X_{t+1}`` in trace order."""
    nodes = _nodes(trace)
    out: dict[tuple[int, int], list[int]] = {}
    for a, b, c in zip(nodes, nodes[1:], nodes[2:]):
        out.setdefault((a, b), []).append(c)
    return out


def _base(graph: Graph, u: int, v: int, non_backtracking: bool) -> tuple[int, ...]:
    nbrs = graph.neighbors(v)
    if non_backtracking and len(nbrs) > 1:
        return tuple(w for w in nbrs if w != u)
    return nbrs


def circulation_violations(trace, graph: Graph, non_backtracking: bool = False) -> list[str]:
    """Check the without-replacement contract on every directed edge.

    Successors following ``u -> v`` are cut into consecutive chunks of
    ``|base|``; each full chunk must be a permutation of the base set
    (``N(v)``, or ``N(v) \\ {u}`` for NB-CNRW) and a trailing partial chunk
    must hold distinct nodes.  Returns human-readable violations.
    """
    problems = []
    for (u, v), succ in successors_by_edge(trace).items():
        base = _base(graph, u, v, non_backtracking)
        size = len(base)
        if non_backtracking and len(graph.neighbors(v)) == 1:
            if any(s != u for s in succ):
                problems.append(f"{u}->{v}: forced backtrack violated")
            continue
        base_set = set(base)
        for lo in range(0, len(succ), size):
            chunk = succ[lo:lo + size]
            if len(set(chunk)) != len(chunk) or not set(chunk) <= base_set:
                problems.append(f"{u}->{v}: repeated or foreign successor in circulation {lo // size}: {chunk}")
            elif len(chunk) == size and set(chunk) != base_set:
                problems.append(f"{u}->{v}: circulation {lo // size} is not a permutation")
    return problems


def alternation_gap(sequence: Sequence[Hashable], support: Iterable[Hashable]) -> int:
    """Largest ``max_i K_i(M) - min_j K_j(M)`` over all prefixes ``M`` of ``sequence``."""
    counts = Counter({s: 0 for s in support})
    worst = 0
    for x in sequence:
        counts[x] += 1
        vals = counts.values()
        worst = max(worst, max(vals) - min(vals))
    return worst


def alternation_violations(trace, graph: Graph, non_backtracking: bool = False) -> list[str]:
    """Edges whose entry-neighbor counts drift apart by more than one at some prefix."""
    problems = []
    for (u, v), succ in successors_by_edge(trace).items():
        if non_backtracking and len(graph.neighbors(v)) == 1:
            continue
        gap = alternation_gap(succ, _base(graph, u, v, non_backtracking))
        if gap > 1:
            problems.append(f"{u}->{v}: block count gap {gap}")
    return problems


def gnrw_replay_violations(
    trace, graph: Graph, grouping: GroupingStrategy, weighting: str = "remaining"
) -> list[str]:
    """Replay GNRW bookkeeping along ``trace`` and report illegal moves.

    Every successor of ``u -> v`` must come from a group not used since the
    last group-round reset and must be untried within its circulation;
    consequently chosen group ids are pairwise distinct between resets.
    """
    session = AccessSession(graph)
    groups_of: dict[int, dict] = {}
    used_groups: dict[tuple[int, int], set] = {}
    tried: dict[tuple[int, int, Hashable], set] = {}
    problems = []
    for (u, v), succ in successors_by_edge(trace).items():
        groups = groups_of.get(v)
        if groups is None:
            groups = groups_of[v] = make_groups(grouping, v, graph.neighbors(v), session)
        where = {w: g for g, members in groups.items() for w in members}
        S = used_groups.setdefault((u, v), set())
        for step, w in enumerate(succ):
            g = where.get(w)
            if g is None:
                problems.append(f"{u}->{v}: successor {w} not a neighbor")
                continue
            b = tried.setdefault((u, v, g), set())
            remaining = {h: len(m) - len(tried.get((u, v, h), ())) for h, m in groups.items()}
            if weighting == "remaining":
                legal = [h for h in groups if h not in S and remaining[h]]
                if not legal:
                    S.clear()
                    legal = [h for h in groups if remaining[h]]
            else:
                legal = [h for h in groups if h not in S]
            if g not in legal:
                problems.append(f"{u}->{v}: group {g!r} reused within a round at successor {step}")
            if w in b:
                problems.append(f"{u}->{v}: node {w} repeated within its circulation at successor {step}")
            b.add(w)
            S.add(g)
            remaining[g] -= 1
            if weighting == "remaining":
                if not any(remaining.values()):
                    for h in groups:
                        tried.get((u, v, h), set()).clear()
                    S.clear()
                elif all(h in S for h in groups if remaining[h]):
                    S.clear()
            else:
                if len(b) == len(groups[g]):
                    b.clear()
                if len(S) == len(groups):
                    S.clear()
    return problems


# ---------------------------------------------------------------------------
# barbell escape

def escape_probability(
    kind: WalkerKind | str,
    n: int,
    reps: int,
    steps: int,
    seed: int = 0,
    grouping: GroupingStrategy | None = None,
) -> tuple[float, int]:
    """Per-visit probability of crossing the bridge of ``gen_barbell(n, n)``.

    Each of ``reps`` walks starts at a uniformly random node of the first
    clique and runs ``steps`` steps.  Every visit to the bridge endpoint
    ``u`` that has a successor in the trace is counted (arrivals over the
    bridge included); a crossing is a step ``u -> w``.  Returns
    ``(crossings / visits, visits)``.
    """
    if n < 2:
        raise ValueError("barbell half-size must be >= 2")
    g = gen_barbell(n, n)
    u, w = barbell_bridge(n, n)
    rng = random.Random(seed)
    visits = crossings = 0
    for _ in range(reps):
        start = rng.randrange(n)
        nodes = walk(kind, AccessSession(g), start, steps=steps, seed=rng.getrandbits(64), grouping=grouping).nodes
        for a, b in zip(nodes, nodes[1:]):
            if a == u:
                visits += 1
                crossings += b == w
    if visits == 0:
        raise ValueError("no visits to the bridge node; increase steps or reps")
    return crossings / visits, visits
