"""Crawling a labelled graph through a budgeted neighbor-query interface.

Writes a small edge list and attribute table to a temporary directory,
loads them the way the command-line tool does, then lets a grouped walker
stratify its choices by a node attribute while it spends a fixed budget.
"""
import csv
import random
import tempfile
from pathlib import Path

from histwalk import AccessSession, ByAttribute, attribute_measure, load_attributes, load_edge_list, uniform_mean, walk

rng = random.Random(5)
tmp = Path(tempfile.mkdtemp())

# two communities of users with different ages, sparsely linked
edges = set()
for lo, hi in ((0, 60), (60, 120)):
    for v in range(lo + 1, hi):
        edges.add((v, rng.randrange(lo, v)))
        edges.add((v, rng.randrange(lo, hi)))
for _ in range(6):
    edges.add((rng.randrange(60), rng.randrange(60, 120)))
(tmp / "edges.txt").write_text("# user_a user_b\n" + "".join(f"u{a}\tu{b}\n" for a, b in edges if a != b))
with open(tmp / "users.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["id", "age", "city"])
    for v in range(120):
        w.writerow([f"u{v}", rng.randint(18, 30) if v < 60 else rng.randint(40, 70), "north" if v < 60 else "south"])

g = load_attributes(load_edge_list(tmp / "edges.txt"), tmp / "users.csv")
truth = sum(g.attributes[v]["age"] for v in range(len(g))) / len(g)
print(f"{len(g)} users, {g.edge_count} friendships, true mean age {truth:.1f}")

for kind, grouping in (("srw", None), ("cnrw", None), ("gnrw", ByAttribute("city"))):
    errors = []
    for rep in range(30):
        session = AccessSession(g)
        tr = walk(kind, session, rep % len(g), budget=60, seed=rep, grouping=grouping)
        est = uniform_mean(tr, attribute_measure(session, "age"), session.degree).estimate
        errors.append(abs(est - truth) / truth)
    label = kind + (f"[{grouping}]" if grouping else "")
    print(f"  {label:16s} budget 60: mean relative error {sum(errors) / len(errors):.3f}, "
          f"{tr.steps} steps in the last walk for {session.unique_query_count} unique queries")

# Grouping by attribute is not free: to know which stratum a neighbor falls
# in, the walker has to query it, so the grouped walk takes fewer steps for
# the same budget.  Hash grouping needs only the neighbor's id and costs nothing.
