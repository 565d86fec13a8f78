"""Do the history-aware walkers keep the simple walk's stationary law?

Pools many independent walks per algorithm and compares the visit
frequencies with k_v / 2|E| (or with the uniform law for Metropolis-Hastings).
"""
from histwalk import AlgorithmSpec, gen_barbell, gen_star, run_stationarity_check

algorithms = [AlgorithmSpec.parse(a) for a in ("srw", "mhrw", "nbsrw", "cnrw", "nbcnrw")]
algorithms += [AlgorithmSpec.parse("gnrw", g) for g in ("hash:2", "degree:2")]

for name, g in (("star with 3 leaves", gen_star(3)), ("barbell(6,6)", gen_barbell(6, 6))):
    print(name)
    for row in run_stationarity_check(g, algorithms, walks=20, steps=10_000, seed=3):
        label = row.algorithm + (f"[{row.grouping}]" if row.grouping else "")
        print(f"  {label:16s} vs {row.target:7s}  l2={row.l2:.4f}  tv={row.tv:.4f}")

# A grouped walk that picks groups in proportion to their *full* size
# breaks the law on the star: the hub's one-element group wins half the time.
biased = run_stationarity_check(gen_star(3), [AlgorithmSpec.parse("gnrw", "degree:2")],
                                walks=20, steps=10_000, seed=3, weighting="size")
print(f"\nsize-weighted grouping on the star: tv={biased[0].tv:.3f}")
