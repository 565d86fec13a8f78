"""Random walks over an :class:`~histwalk.access.AccessSession`.

Six walks are provided:

* ``SRW``     simple random walk, uniform over the current node's neighbors.
* ``MHRW``    Metropolis-Hastings walk targeting the uniform distribution.
* ``NBSRW``   non-backtracking walk: never steps straight back unless forced.
* ``CNRW``    circulated-neighbors walk.  For every directed edge ``u -> v`` it
  samples the successor of ``v`` *without replacement* from ``N(v)``; once all
  neighbors have been used after ``u -> v`` the history for that edge resets.
* ``GNRW``    groupby-neighbors walk.  Neighbors of ``v`` are partitioned by a
  grouping strategy and the walk circulates over groups first, then over
  nodes inside the chosen group.
* ``NBCNRW``  circulated-neighbors sampling applied to the non-backtracking
  base set ``N(v) \\ {u}``.

CNRW, GNRW, NB-SRW and NB-CNRW keep the degree-proportional stationary
distribution of SRW; MHRW converges to the uniform distribution.

All walkers see the graph only through ``session.query`` and are pure
functions of ``(graph, start, seed, config)``.
"""
from __future__ import annotations

import bisect
import csv
import enum
import hashlib
import random
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Hashable, Mapping, Sequence, TextIO, Union

from .access import AccessSession, BudgetExhausted


class WalkerKind(enum.Enum):
    SRW = "srw"
    MHRW = "mhrw"
    NBSRW = "nbsrw"
    CNRW = "cnrw"
    GNRW = "gnrw"
    NBCNRW = "nbcnrw"


# ---------------------------------------------------------------------------
# grouping strategies

@dataclass(frozen=True)
class ByHash:
    """Group by a stable 64-bit hash of the neighbor's original id, modulo ``m``.

    The hash is BLAKE2b with an 8-byte digest over the UTF-8 id, read
    little-endian; it does not depend on interpreter hash seeding.
    """

    m: int = 2

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("group count m must be >= 1")

    def __str__(self) -> str:
        return f"hash:{self.m}"


@dataclass(frozen=True)
class ByDegreeQuantile:
    """Sort neighbors by degree (ties by id) and cut into ``m`` contiguous buckets.

    Bucket sizes differ by at most one, larger buckets first.  Knowing a
    neighbor's degree requires querying it, so this strategy spends budget.
    """

    m: int = 2

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("group count m must be >= 1")

    def __str__(self) -> str:
        return f"degree:{self.m}"


@dataclass(frozen=True)
class ByAttribute:
    """Group by a node attribute.

    With ``m=None`` every distinct value is its own group.  With an integer
    ``m`` numeric values fall into ``m`` quantile buckets (bucket of a value =
    ``floor(m * share of neighbors with a strictly smaller value)``, so equal
    values always share a bucket) and non-numeric values keep one group per
    value.  Neighbors lacking the attribute form a separate ``"missing"``
    group.  Reading attributes queries every neighbor.
    """

    name: str
    m: int | None = None

    def __post_init__(self):
        if self.m is not None and self.m < 1:
            raise ValueError("bucket count m must be >= 1")

    def __str__(self) -> str:
        return f"attr:{self.name}" + (f":{self.m}" if self.m is not None else "")


GroupingStrategy = Union[ByHash, ByDegreeQuantile, ByAttribute]

MISSING = "missing"


def parse_grouping(text: str) -> GroupingStrategy:
    """Parse ``hash:m``, ``degree:m`` or ``attr:NAME[:m]``."""
    parts = text.split(":")
    kind = parts[0].strip().lower()
    try:
        if kind == "hash" and len(parts) == 2:
            return ByHash(int(parts[1]))
        if kind == "degree" and len(parts) == 2:
            return ByDegreeQuantile(int(parts[1]))
        if kind == "attr" and len(parts) in (2, 3) and parts[1]:
            return ByAttribute(parts[1], int(parts[2]) if len(parts) == 3 else None)
    except ValueError as exc:
        raise ValueError(f"bad grouping spec {text!r}: {exc}") from None
    raise ValueError(f"bad grouping spec {text!r}")


def stable_hash(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest(), "little")


def _split_sizes(n: int, m: int) -> list[int]:
    q, r = divmod(n, m)
    return [q + 1 if i < r else q for i in range(m)]


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def make_groups(
    strategy: GroupingStrategy, v: int, neighbors: Sequence[int], session: AccessSession
) -> dict[Hashable, tuple[int, ...]]:
    """Partition ``neighbors`` of ``v`` into disjoint, exhaustive, non-empty groups.

    Returns an ordered mapping group id -> member nodes (ascending).  Group ids
    are derived from the partition rule (bucket index or attribute value), so
    they are stable across visits to ``v``.
    """
    if not neighbors:
        raise ValueError(f"node {v} has no neighbors to group")
    buckets: dict[Hashable, list[int]] = {}

    if isinstance(strategy, ByHash):
        for w in neighbors:
            buckets.setdefault(stable_hash(session.label(w)) % strategy.m, []).append(w)
        order = sorted(buckets)

    elif isinstance(strategy, ByDegreeQuantile):
        ranked = sorted(neighbors, key=lambda w: (len(session.query(w)[0]), w))
        pos = 0
        for i, size in enumerate(_split_sizes(len(ranked), strategy.m)):
            if size:
                buckets[i] = ranked[pos:pos + size]
            pos += size
        order = list(buckets)

    elif isinstance(strategy, ByAttribute):
        values = {w: session.query(w)[1].get(strategy.name) for w in neighbors}
        numeric = [w for w in neighbors if values[w] is not None and _is_number(values[w])]
        if strategy.m is not None and numeric:
            sorted_vals = sorted(values[w] for w in numeric)
            n = len(sorted_vals)
            for w in numeric:
                below = bisect.bisect_left(sorted_vals, values[w])
                buckets.setdefault(("q", min(strategy.m - 1, strategy.m * below // n)), []).append(w)
            taken = set(numeric)
        else:
            taken = set()
        for w in neighbors:
            if w in taken:
                continue
            val = values[w]
            buckets.setdefault(MISSING if val is None else ("v", val), []).append(w)
        order = sorted((g for g in buckets if g != MISSING), key=repr)
        if MISSING in buckets:
            order.append(MISSING)
    else:
        raise TypeError(f"unknown grouping strategy {strategy!r}")

    return {g: tuple(sorted(buckets[g])) for g in order}


# ---------------------------------------------------------------------------
# walker state and single steps

@dataclass
class WalkerState:
    """Mutable per-walk state.

    ``history_b`` maps a directed edge ``(u, v)`` to the successors of ``v``
    already used in the current circulation.  GNRW additionally keeps
    ``history_S`` (groups used in the current group round) and
    ``history_bS`` (per-group used successors, keyed ``(u, v, group id)``).
    """

    curr: int
    rng: random.Random
    prev: int | None = None
    history_b: dict[tuple[int, int], set[int]] = field(default_factory=dict)
    history_S: dict[tuple[int, int], set[Hashable]] = field(default_factory=dict)
    history_bS: dict[tuple[int, int, Hashable], set[int]] = field(default_factory=dict)
    groups: dict[int, dict[Hashable, tuple[int, ...]]] = field(default_factory=dict, repr=False)
    bases: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict, repr=False)

    @classmethod
    def start(cls, node: int, seed: int | None = 0) -> "WalkerState":
        return cls(curr=node, rng=random.Random(seed))

    def advance(self, nxt: int) -> int:
        self.prev, self.curr = self.curr, nxt
        return nxt


def _choice(pool: Sequence[int], rng: random.Random) -> int:
    return pool[int(rng.random() * len(pool))]


def _choice_unused(pool: Sequence[int], used: set[int], rng: random.Random) -> int:
    """Uniform draw from ``pool`` minus ``used`` (``used`` must be a strict subset)."""
    n = len(pool)
    if 2 * len(used) <= n:
        rand = rng.random
        while True:
            w = pool[int(rand() * n)]
            if w not in used:
                return w
    return _choice([w for w in pool if w not in used], rng)


def _neighbors(session: AccessSession, v: int) -> tuple[int, ...]:
    nbrs = session.query(v)[0]
    if not nbrs:
        raise ValueError(f"node {v} is isolated; cannot step")
    return nbrs


def step_srw(state: WalkerState, session: AccessSession) -> int:
    return state.advance(_choice(_neighbors(session, state.curr), state.rng))


def step_mhrw(state: WalkerState, session: AccessSession) -> int:
    """Propose a uniform neighbor, accept with ``min(1, k_curr / k_proposal)``.

    A rejected proposal repeats the current node.  The proposal is queried
    to learn its degree, so it costs budget even when rejected.
    """
    v = state.curr
    nbrs = _neighbors(session, v)
    w = _choice(nbrs, state.rng)
    kw = len(session.query(w)[0])
    kv = len(nbrs)
    if kw <= kv or state.rng.random() * kw < kv:
        return state.advance(w)
    return state.advance(v)


def step_nbsrw(state: WalkerState, session: AccessSession) -> int:
    v, u = state.curr, state.prev
    nbrs = _neighbors(session, v)
    if u is None or len(nbrs) == 1:
        return state.advance(_choice(nbrs, state.rng))
    return state.advance(_choice_unused(nbrs, {u}, state.rng))


def _circulate(state: WalkerState, key: tuple[int, int], base: Sequence[int]) -> int:
    used = state.history_b.get(key)
    if used is None:
        used = state.history_b[key] = set()
    w = _choice_unused(base, used, state.rng)
    used.add(w)
    if len(used) == len(base):
        used.clear()
    return w


def step_cnrw(state: WalkerState, session: AccessSession) -> int:
    """Successor of ``v`` drawn without replacement per incoming edge ``u -> v``.

    Choose-then-record: the node picked on the step that completes a
    circulation is recorded before the reset, so each circulation is a
    uniformly random permutation of ``N(v)``.  The first step of a walk has
    no incoming edge and is a plain SRW step.
    """
    v, u = state.curr, state.prev
    nbrs = _neighbors(session, v)
    if u is None:
        return state.advance(_choice(nbrs, state.rng))
    return state.advance(_circulate(state, (u, v), nbrs))


def step_nbcnrw(state: WalkerState, session: AccessSession) -> int:
    v, u = state.curr, state.prev
    nbrs = _neighbors(session, v)
    if u is None:
        return state.advance(_choice(nbrs, state.rng))
    if len(nbrs) == 1:
        return state.advance(nbrs[0])
    base = state.bases.get((u, v))
    if base is None:
        base = state.bases[(u, v)] = tuple(w for w in nbrs if w != u)
    return state.advance(_circulate(state, (u, v), base))


def _weighted_pick(items: list, weights: list[int], rng: random.Random):
    r = rng.random() * sum(weights)
    acc = 0
    for item, wt in zip(items, weights):
        acc += wt
        if r < acc:
            return item
    return items[-1]


def step_gnrw(
    state: WalkerState,
    session: AccessSession,
    strategy: GroupingStrategy,
    weighting: str = "remaining",
) -> int:
    """One GNRW step.

    ``weighting="remaining"`` (default): candidate groups are those not yet
    used in the current group round that still hold untried successors; a
    group is picked with probability proportional to its untried count and
    a node uniformly among its untried members.  Untried-ness is tracked per
    incoming edge over the whole of ``N(v)`` and resets once every neighbor
    was used, so every circulation visits each neighbor exactly once and the
    degree-proportional stationary distribution is kept.

    ``weighting="size"``: groups are picked proportionally to their full size
    and each group keeps its own circulation that resets independently.  Each
    group is then used once per round regardless of size, which biases the
    walk toward members of small groups whenever group sizes differ.
    """
    v, u = state.curr, state.prev
    nbrs = _neighbors(session, v)
    if u is None:
        return state.advance(_choice(nbrs, state.rng))
    groups = state.groups.get(v)
    if groups is None:
        groups = state.groups[v] = make_groups(strategy, v, nbrs, session)
    key = (u, v)
    rng = state.rng
    used_groups = state.history_S.get(key)
    if used_groups is None:
        used_groups = state.history_S[key] = set()
    bS = state.history_bS

    if weighting == "remaining":
        used = state.history_b.get(key)
        if used is None:
            used = state.history_b[key] = set()
        live_g, live_r = [], []
        cand_g, cand_r = [], []
        for g, members in groups.items():
            b = bS.get((u, v, g))
            r = len(members) - len(b) if b else len(members)
            if r:
                live_g.append(g)
                live_r.append(r)
                if g not in used_groups:
                    cand_g.append(g)
                    cand_r.append(r)
        if not cand_g:
            used_groups.clear()
            cand_g, cand_r = live_g, live_r
        g = cand_g[0] if len(cand_g) == 1 else _weighted_pick(cand_g, cand_r, rng)
        b = bS.get((u, v, g))
        if b is None:
            b = bS[(u, v, g)] = set()
        w = _choice_unused(groups[g], b, rng)
        b.add(w)
        used.add(w)
        if len(used) == len(nbrs):
            used.clear()
            for h in groups:
                hb = bS.get((u, v, h))
                if hb:
                    hb.clear()
            used_groups.clear()
        else:
            used_groups.add(g)
            # round over once every group that still has untried members was used
            for h in live_g:
                if h not in used_groups:
                    break
            else:
                used_groups.clear()
        return state.advance(w)

    if weighting == "size":
        cand = [g for g in groups if g not in used_groups]
        g = _weighted_pick(cand, [len(groups[g]) for g in cand], rng)
        members = groups[g]
        b = bS.get((u, v, g))
        if b is None:
            b = bS[(u, v, g)] = set()
        w = _choice_unused(members, b, rng)
        b.add(w)
        if len(b) == len(members):
            b.clear()
        used_groups.add(g)
        if len(used_groups) == len(groups):
            used_groups.clear()
        return state.advance(w)

    raise ValueError(f"unknown GNRW weighting {weighting!r}")


# ---------------------------------------------------------------------------
# whole walks

@dataclass
class Trace:
    """Visited nodes ``X_0..X_n`` with the unique-query count after each visit."""

    nodes: list[int]
    queries: list[int]
    kind: str = ""
    budget_terminated: bool = False

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def steps(self) -> int:
        return len(self.nodes) - 1

    @property
    def unique_queries(self) -> int:
        return self.queries[-1] if self.queries else 0


Stepper = Callable[[WalkerState, AccessSession], int]

_STEPS: Mapping[WalkerKind, Stepper] = {
    WalkerKind.SRW: step_srw,
    WalkerKind.MHRW: step_mhrw,
    WalkerKind.NBSRW: step_nbsrw,
    WalkerKind.CNRW: step_cnrw,
    WalkerKind.NBCNRW: step_nbcnrw,
}


def stepper(
    kind: WalkerKind | str, grouping: GroupingStrategy | None = None, weighting: str = "remaining"
) -> Stepper:
    kind = WalkerKind(kind)
    if kind is WalkerKind.GNRW:
        if grouping is None:
            raise ValueError("GNRW needs a grouping strategy")
        if weighting not in ("remaining", "size"):
            raise ValueError(f"unknown GNRW weighting {weighting!r}")
        return partial(step_gnrw, strategy=grouping, weighting=weighting)
    return _STEPS[kind]


def walk(
    kind: WalkerKind | str,
    session: AccessSession,
    start: int,
    *,
    steps: int | None = None,
    budget: int | None = None,
    seed: int | None = 0,
    grouping: GroupingStrategy | None = None,
    weighting: str = "remaining",
    max_steps: int | None = None,
) -> Trace:
    """Run one walk from ``start``.

    Exactly one of ``steps`` and ``budget`` must be given.  In budget mode
    the walk continues until the next uncached query would exceed the
    budget (returning a trace flagged ``budget_terminated``) or until
    ``max_steps`` steps were taken (default ``100 * budget``), whichever
    comes first.  Revisits are served from the cache and cost nothing.
    """
    if (steps is None) == (budget is None):
        raise ValueError("give exactly one of steps or budget")
    kind = WalkerKind(kind)
    step = stepper(kind, grouping, weighting)
    if budget is not None:
        if budget < 1:
            raise ValueError("budget must be positive")
        if session.budget is None:
            session.budget = budget
        elif session.budget != budget:
            raise ValueError("session already carries a different budget")
        limit = 100 * budget if max_steps is None else max_steps
    else:
        if steps < 0:
            raise ValueError("steps must be >= 0")
        limit = steps

    state = WalkerState.start(start, seed)
    query = session.query
    query(start)
    nodes = [start]
    queries = [session.unique_query_count]
    push_node, push_count = nodes.append, queries.append
    terminated = False
    for _ in range(limit):
        try:
            nxt = step(state, session)
            query(nxt)
        except BudgetExhausted:
            terminated = True
            break
        push_node(nxt)
        push_count(session.unique_query_count)
    label = kind.value if grouping is None or kind is not WalkerKind.GNRW else f"gnrw[{grouping}]"
    return Trace(nodes, queries, label, terminated)


def write_trace_csv(trace: Trace, labels: Sequence[str], fh: TextIO) -> None:
    """Write ``step,node_id,unique_queries`` rows using original node ids."""
    writer = csv.writer(fh)
    writer.writerow(["step", "node_id", "unique_queries"])
    for i, (v, q) in enumerate(zip(trace.nodes, trace.queries)):
        writer.writerow([i, labels[v], q])
