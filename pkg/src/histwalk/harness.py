"""Budget sweeps and stationarity checks producing CSV rows."""
from __future__ import annotations

import csv
import hashlib
import io
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Sequence, TextIO

import numpy as np

from .access import AccessSession
from .estimation import (
    Measure,
    attribute_measure,
    degree_measure,
    empirical_distribution,
    indicator_measure,
    stationary_mean,
    uniform_mean,
)
from .graph import EdgePolicy, Graph, load_attributes, load_edge_list, parse_generator, true_stationary
from .metrics import kl_symmetric, l2_distance, relative_error, total_variation
from .walkers import GroupingStrategy, WalkerKind, parse_grouping, walk


class ConfigError(ValueError):
    pass


METRICS = ("kl", "l2", "relerr")


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: WalkerKind
    grouping: GroupingStrategy | None = None

    @classmethod
    def parse(cls, algo: str, grouping: str | None = None) -> "AlgorithmSpec":
        try:
            kind = WalkerKind(algo.strip().lower())
        except ValueError:
            raise ConfigError(f"unknown algorithm {algo!r}") from None
        if kind is WalkerKind.GNRW:
            if grouping is None:
                raise ConfigError("gnrw requires a grouping strategy")
            try:
                return cls(kind, parse_grouping(grouping))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        return cls(kind)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def grouping_label(self) -> str:
        return str(self.grouping) if self.grouping is not None else ""


@dataclass
class ExperimentConfig:
    """Declarative description of a sweep.

    ``graph`` is an edge-list path or a generator spec such as
    ``barbell:25,25``.  Exactly one of ``budgets`` and ``steps`` is used.
    ``measure`` is ``degree``, ``attr:NAME`` or ``indicator:FILE``.
    ``start`` is ``uniform``, ``degree`` or ``fixed:NODE_ID``.
    """

    graph: str
    algorithms: list[AlgorithmSpec]
    budgets: list[int] = field(default_factory=list)
    steps: int | None = None
    reps: int = 1
    seed: int = 0
    measure: str = "degree"
    metrics: tuple[str, ...] = METRICS
    burnin: int = 0
    start: str = "uniform"
    attrs: str | None = None
    edge_policy: str = "either"
    weighting: str = "remaining"

    def validate(self) -> None:
        if not self.algorithms:
            raise ConfigError("at least one algorithm required")
        if (self.steps is None) == (not self.budgets):
            raise ConfigError("give either budgets or steps")
        if self.budgets:
            if any(b < 1 for b in self.budgets):
                raise ConfigError("budgets must be positive")
            if list(self.budgets) != sorted(set(self.budgets)):
                raise ConfigError("budgets must be strictly ascending")
        if self.steps is not None and self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.burnin < 0:
            raise ConfigError("burnin must be >= 0")
        bad = set(self.metrics) - set(METRICS)
        if bad:
            raise ConfigError(f"unknown metrics {sorted(bad)}")
        if not (self.start in ("uniform", "degree") or self.start.startswith("fixed:")):
            raise ConfigError(f"unknown start policy {self.start!r}")
        if self.weighting not in ("remaining", "size"):
            raise ConfigError(f"unknown GNRW weighting {self.weighting!r}")


@dataclass
class ResultRow:
    algorithm: str
    grouping: str
    rep: int
    budget: int | None
    steps_taken: int
    unique_queries: int
    estimate: float
    relative_error: float | None
    kl: float | None
    l2: float | None
    seed: int


ROW_FIELDS = [f.name for f in fields(ResultRow)]


def derive_seed(seed: int, algorithm: str, budget: int | None, rep: int) -> int:
    """Stable 63-bit seed for one (algorithm, budget, rep) cell."""
    key = f"{seed}|{algorithm}|{'' if budget is None else budget}|{rep}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little") >> 1


def load_graph(source: str, edge_policy: str = "either", attrs: str | None = None) -> Graph:
    try:
        if os.path.exists(source):
            g = load_edge_list(source, EdgePolicy(edge_policy))
        else:
            g = parse_generator(source)
        if attrs:
            g = load_attributes(g, attrs)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load graph {source!r}: {exc}") from exc
    return g


def _read_node_set(g: Graph, path: str) -> set[int]:
    with open(path, encoding="utf-8") as fh:
        ids = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    return {g.node_of(x) for x in ids}


def _measure_on(g: Graph, spec: str, source) -> Measure:
    if spec == "degree":
        return degree_measure(source)
    if spec.startswith("attr:"):
        return attribute_measure(source, spec[5:])
    if spec.startswith("indicator:"):
        return indicator_measure(_read_node_set(g, spec[len("indicator:"):]), spec)
    raise ConfigError(f"unknown measure {spec!r}")


def _start_node(g: Graph, policy: str, rng: random.Random) -> int:
    if policy == "uniform":
        return rng.randrange(len(g))
    if policy == "degree":
        return rng.choices(range(len(g)), weights=g.degrees().tolist())[0]
    return g.node_of(policy[len("fixed:"):])


def _run_cell(g: Graph, config: ExperimentConfig, algo: AlgorithmSpec, budget, rep, truth, ideal) -> ResultRow:
    label = algo.name + (f"[{algo.grouping_label}]" if algo.grouping else "")
    cell_seed = derive_seed(config.seed, label, budget, rep)
    rng = random.Random(cell_seed)
    start = _start_node(g, config.start, rng)
    session = AccessSession(g)
    trace = walk(
        algo.kind,
        session,
        start,
        steps=config.steps,
        budget=budget,
        seed=rng.getrandbits(63),
        grouping=algo.grouping,
        weighting=config.weighting,
    )
    f = _measure_on(g, config.measure, session)
    burnin = min(config.burnin, len(trace) - 1)
    if algo.kind is WalkerKind.MHRW:
        est = stationary_mean(trace, f, burnin).estimate
    else:
        est = uniform_mean(trace, f, session.degree, burnin).estimate
    relerr = kl = l2 = None
    if "relerr" in config.metrics and truth != 0:
        relerr = relative_error(est, truth)
    if "kl" in config.metrics or "l2" in config.metrics:
        p_sam = empirical_distribution([trace], len(g), burnin)
        target = ideal["uniform"] if algo.kind is WalkerKind.MHRW else ideal["degree"]
        if "kl" in config.metrics:
            kl = kl_symmetric(target, p_sam)
        if "l2" in config.metrics:
            l2 = l2_distance(target, p_sam)
    return ResultRow(
        algorithm=algo.name,
        grouping=algo.grouping_label,
        rep=rep,
        budget=budget,
        steps_taken=trace.steps,
        unique_queries=session.unique_query_count,
        estimate=est,
        relative_error=relerr,
        kl=kl,
        l2=l2,
        seed=cell_seed,
    )


def run_experiment(config: ExperimentConfig, workers: int = 1, graph: Graph | None = None) -> list[ResultRow]:
    """Run every (algorithm, budget, rep) cell; rows come back in canonical order.

    Ground truth (node-uniform mean of the measure, target distributions)
    is computed from the full local graph.
    """
    config.validate()
    g = graph if graph is not None else load_graph(config.graph, config.edge_policy, config.attrs)
    f_full = _measure_on(g, config.measure, g)
    try:
        truth = float(np.mean([f_full(v) for v in range(len(g))]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ideal = {"degree": true_stationary(g), "uniform": np.full(len(g), 1.0 / len(g))}
    budgets = list(config.budgets) or [None]
    cells = [(a, b, r) for a in config.algorithms for b in budgets for r in range(config.reps)]

    def job(cell):
        return _run_cell(g, config, *cell, truth, ideal)

    if workers <= 1:
        return [job(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, cells))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_rows(rows: Sequence[ResultRow], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(ROW_FIELDS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[k]) for k in ROW_FIELDS])


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO(newline="")
    write_rows(rows, buf)
    return buf.getvalue()


@dataclass
class StationarityRow:
    algorithm: str
    grouping: str
    target: str
    samples: int
    kl: float
    l2: float
    tv: float


def run_stationarity_check(
    g: Graph,
    algorithms: Sequence[AlgorithmSpec],
    walks: int,
    steps: int,
    seed: int = 0,
    start: str = "degree",
    weighting: str = "remaining",
) -> list[StationarityRow]:
    """Pool ``walks`` runs of ``steps`` steps per algorithm and compare with the target law.

    MHRW is compared with the uniform distribution, every other walk with
    ``k_v / 2|E|``.  Starts default to degree-proportional draws so the
    pooled counts are not dominated by the initial transient.
    """
    if not g.is_connected():
        raise ConfigError("stationarity check needs a connected graph")
    pi = true_stationary(g)
    uniform = np.full(len(g), 1.0 / len(g))
    report = []
    for algo in algorithms:
        label = algo.name + (f"[{algo.grouping_label}]" if algo.grouping else "")
        counts = np.zeros(len(g), dtype=np.int64)
        for r in range(walks):
            rng = random.Random(derive_seed(seed, label, None, r))
            s = _start_node(g, start, rng)
            tr = walk(algo.kind, AccessSession(g), s, steps=steps, seed=rng.getrandbits(63),
                      grouping=algo.grouping, weighting=weighting)
            counts += np.bincount(np.asarray(tr.nodes, dtype=np.int64), minlength=len(g))
        p_sam = counts / counts.sum()
        target = uniform if algo.kind is WalkerKind.MHRW else pi
        report.append(StationarityRow(
            algorithm=algo.name,
            grouping=algo.grouping_label,
            target="uniform" if algo.kind is WalkerKind.MHRW else "degree",
            samples=int(counts.sum()),
            kl=kl_symmetric(target, p_sam),
            l2=l2_distance(target, p_sam),
            tv=total_variation(target, p_sam),
        ))
    return report
