"""Relative error of the average degree as the query budget grows.

Runs a small sweep on a chain of three clusters, then averages the raw
per-replicate rows into a table.  The harness itself only emits rows;
aggregation is left to whoever reads the CSV, as done here.
"""
from collections import defaultdict

import numpy as np

from histwalk import AlgorithmSpec, ExperimentConfig, run_experiment
from histwalk.harness import rows_to_csv

config = ExperimentConfig(
    graph="clustered:20,40,60",
    algorithms=[
        AlgorithmSpec.parse("srw"),
        AlgorithmSpec.parse("mhrw"),
        AlgorithmSpec.parse("cnrw"),
        AlgorithmSpec.parse("gnrw", "degree:2"),
    ],
    budgets=[20, 40, 60, 80, 100],
    reps=40,
    seed=11,
    metrics=("relerr",),
)
rows = run_experiment(config, workers=4)

table = defaultdict(list)
for r in rows:
    table[r.algorithm + (f"[{r.grouping}]" if r.grouping else ""), r.budget].append(r.relative_error)

algos = list(dict.fromkeys(name for name, _ in table))
print("mean relative error of the degree estimate")
print(f"{'budget':>8s}" + "".join(f"{a:>18s}" for a in algos))
for b in config.budgets:
    print(f"{b:8d}" + "".join(f"{np.mean(table[a, b]):18.3f}" for a in algos))

# The same rows as CSV, exactly what the command-line tool writes.
print("\nfirst CSV lines:")
print("".join(rows_to_csv(rows).splitlines(keepends=True)[:3]), end="")
