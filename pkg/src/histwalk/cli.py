"""Command-line budget sweep: ``python -m histwalk --gen barbell:25,25 --algo srw --algo cnrw ...``."""
from __future__ import annotations

import argparse
import sys

from .harness import AlgorithmSpec, ConfigError, ExperimentConfig, METRICS, run_experiment, write_rows


def parse_budgets(text: str) -> list[int]:
    """``start:stop:step`` (inclusive stop) or a comma list."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"budget range must be start:stop:step, got {text!r}")
        start, stop, step = parts
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="histwalk", description="Run random-walk sampling sweeps and write CSV rows.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", metavar="FILE", help="edge-list file")
    src.add_argument("--gen", metavar="SPEC", help="barbell:n1,n2 or clustered:s1,s2,...")
    p.add_argument("--edge-policy", choices=["either", "mutual"], default="either")
    p.add_argument("--algo", action="append", required=True,
                   choices=["srw", "mhrw", "nbsrw", "cnrw", "gnrw", "nbcnrw"])
    p.add_argument("--groupby", action="append", default=[],
                   help="hash:m, degree:m or attr:NAME[:m]; one GNRW variant per value")
    p.add_argument("--weighting", choices=["remaining", "size"], default="remaining")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--budgets", help="start:stop:step or comma list")
    mode.add_argument("--steps", type=int)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure", default="degree", help="degree, attr:NAME or indicator:FILE")
    p.add_argument("--burnin", type=int, default=0)
    p.add_argument("--metrics", default=",".join(METRICS))
    p.add_argument("--start", default="uniform", help="uniform, degree or fixed:NODE_ID")
    p.add_argument("--attrs", metavar="FILE")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="FILE.csv", help="output path (default stdout)")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    algos = []
    for a in dict.fromkeys(args.algo):
        if a == "gnrw":
            if not args.groupby:
                raise ConfigError("--algo gnrw needs at least one --groupby")
            algos += [AlgorithmSpec.parse(a, g) for g in args.groupby]
        else:
            algos.append(AlgorithmSpec.parse(a))
    try:
        budgets = parse_budgets(args.budgets) if args.budgets else []
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(
        graph=args.graph or args.gen,
        algorithms=algos,
        budgets=budgets,
        steps=args.steps,
        reps=args.reps,
        seed=args.seed,
        measure=args.measure,
        metrics=tuple(m.strip() for m in args.metrics.split(",") if m.strip()),
        burnin=args.burnin,
        start=args.start,
        attrs=args.attrs,
        edge_policy=args.edge_policy,
        weighting=args.weighting,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        rows = run_experiment(config, workers=args.workers)
    except ConfigError as exc:
        print(f"histwalk: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_rows(rows, fh)
    else:
        write_rows(rows, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
