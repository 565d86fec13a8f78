"""Two cliques joined by a single edge: how often does each walker cross?

A barbell graph is the classic trap for random walks.  The walker has to be
sitting on the bridge endpoint and pick the one outgoing edge that leads to
the other clique.  This script measures that per-visit crossing rate and the
replicate variance of "fraction of samples in the second clique", the
quantity the history-aware walkers are meant to improve.
"""
import random

import numpy as np

from histwalk import AccessSession, ByHash, Measure, asymptotic_variance, escape_probability, gen_barbell, uniform_mean, walk

N = 10

print(f"barbell({N},{N}): per-visit probability of leaving through the bridge")
for kind in ("srw", "cnrw", "nbcnrw"):
    p, visits = escape_probability(kind, N, reps=10, steps=20_000, seed=1)
    print(f"  {kind:7s} {p:.4f}  ({visits} visits, 1/n = {1 / N:.4f})")

# The crossing rate is a long-run edge flow, and every walker here keeps the
# same stationary law k_v / 2|E|, so all three land near 1/n.  Where the
# history-aware walkers differ is in *how regularly* they cross: CNRW
# never tries the same exit twice in a row from the same direction.

g = gen_barbell(25, 25)
in_second = Measure("in_G2", lambda v: float(v >= 25))
rng = random.Random(7)
seeds = [(rng.randrange(50), rng.getrandbits(63)) for _ in range(200)]

print("\nbarbell(25,25): n * Var of the second-clique share over 200 walks of 2000 steps")
for kind, grouping in (("srw", None), ("cnrw", None), ("gnrw", ByHash(2))):
    estimates = []
    for start, seed in seeds:
        s = AccessSession(g)
        tr = walk(kind, s, start, steps=2000, seed=seed, grouping=grouping)
        estimates.append(uniform_mean(tr, in_second, s.degree, burnin=1).estimate)
    v = asymptotic_variance(estimates, 2000)
    print(f"  {kind:5s} mean {np.mean(estimates):.3f}  V ~ {v:7.1f}")
