import io
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from histwalk.access import AccessSession
from histwalk.graph import Graph, gen_barbell, gen_complete, gen_path, gen_star, true_stationary
from histwalk.pathblocks import circulation_violations, gnrw_replay_violations
from histwalk.walkers import (
    MISSING,
    ByAttribute,
    ByDegreeQuantile,
    ByHash,
    WalkerState,
    make_groups,
    parse_grouping,
    step_cnrw,
    step_gnrw,
    step_mhrw,
    step_nbcnrw,
    step_nbsrw,
    step_srw,
    walk,
    write_trace_csv,
)

from conftest import connected_graphs

N_DRAWS = 30000


def next_counts(step, graph, prev, curr, setup=None, n=N_DRAWS):
    """Distribution of a single step from a fixed state, over independent seeds."""
    session = AccessSession(graph)
    counts = Counter()
    for seed in range(n):
        state = WalkerState(curr=curr, prev=prev, rng=random.Random(seed))
        if setup:
            setup(state)
        counts[step(state, session)] += 1
    return counts


def assert_uniform_over(counts, support, n=N_DRAWS):
    assert set(counts) == set(support)
    if len(support) == 1:
        return
    expected = [n / len(support)] * len(support)
    assert stats.chisquare([counts[x] for x in support], expected).pvalue > 1e-3


# hub 0 with neighbors 1, 2, 3 (all linked to 4 so nothing is a leaf)
HUB = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])


def test_srw_uniform_over_neighbors():
    assert_uniform_over(next_counts(step_srw, HUB, None, 0), [1, 2, 3])


def test_srw_leaf_backtracks():
    assert next_counts(step_srw, gen_path(3), 1, 0, n=50) == Counter({1: 50})


def test_srw_k3_occupancy():
    tr = walk("srw", AccessSession(gen_complete(3)), 0, steps=10**6, seed=5)
    occ = np.bincount(tr.nodes, minlength=3) / len(tr)
    np.testing.assert_allclose(occ, [1 / 3] * 3, atol=0.01)


def test_mhrw_accepts_lower_degree_proposals():
    # node 0 has degree 4, its neighbors have degree 2
    g = Graph.from_edges(6, [(0, i) for i in range(1, 5)] + [(i, 5) for i in range(1, 5)])
    counts = next_counts(step_mhrw, g, None, 0, n=2000)
    assert counts[0] == 0


def test_mhrw_accept_probability_half():
    # node 0 has degree 2, both neighbors have degree 4
    g = Graph.from_edges(7, [(0, 1), (0, 2)] + [(a, b) for a in (1, 2) for b in (3, 4, 5)])
    counts = next_counts(step_mhrw, g, None, 0)
    assert counts[0] / N_DRAWS == pytest.approx(0.5, abs=0.015)
    assert counts[1] / N_DRAWS == pytest.approx(0.25, abs=0.015)


def test_mhrw_star_uniform():
    tr = walk("mhrw", AccessSession(gen_star(3)), 0, steps=400_000, seed=2)
    occ = np.bincount(tr.nodes, minlength=4) / len(tr)
    np.testing.assert_allclose(occ, [0.25] * 4, atol=0.01)


def test_nbsrw_avoids_previous():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)])
    counts = next_counts(step_nbsrw, g, 1, 0)
    assert counts[1] == 0
    assert_uniform_over(counts, [2, 3])


def test_nbsrw_path_cycle():
    tr = walk("nbsrw", AccessSession(gen_path(3)), 0, steps=4000, seed=0)
    # from a leaf the walk is forced: 0,1,2,1,0,1,2,... period [0,1,2,1]
    assert tr.nodes[:8] == [0, 1, 2, 1, 0, 1, 2, 1]
    occ = np.bincount(tr.nodes[:4000], minlength=3) / 4000
    np.testing.assert_allclose(occ, [0.25, 0.5, 0.25])


def test_cnrw_forced_last_neighbor_then_reset():
    def setup(s):
        s.history_b[(4, 0)] = {1, 2}

    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    state = WalkerState(curr=0, prev=4, rng=random.Random(0))
    setup(state)
    # N(0) = {1,2,3,4}; with 1,2 used, next is uniform over {3,4}
    assert_uniform_over(next_counts(step_cnrw, g, 4, 0, setup), [3, 4])

    state.history_b[(4, 0)] = {1, 2, 4}
    assert step_cnrw(state, AccessSession(g)) == 3
    assert state.history_b[(4, 0)] == set()


def test_cnrw_partial_history_uniform():
    counts = next_counts(step_cnrw, HUB, 4, 1, lambda s: s.history_b.update({(4, 1): {0}}))
    assert_uniform_over(counts, [4])
    counts = next_counts(step_cnrw, HUB, 1, 0, lambda s: s.history_b.update({(1, 0): {1}}))
    assert_uniform_over(counts, [2, 3])


def test_cnrw_first_step_is_srw():
    assert_uniform_over(next_counts(step_cnrw, HUB, None, 0), [1, 2, 3])


def test_nbcnrw_examples():
    counts = next_counts(step_nbcnrw, HUB, 1, 0)
    assert_uniform_over(counts, [2, 3])
    counts = next_counts(step_nbcnrw, HUB, 1, 0, lambda s: s.history_b.update({(1, 0): {2}}), n=100)
    assert counts == Counter({3: 100})
    assert next_counts(step_nbcnrw, gen_path(3), 1, 0, n=20) == Counter({1: 20})


# --- grouping ------------------------------------------------------------

def labelled_hub():
    """Hub 0 with neighbors 1,2 (attr t=x) and 3 (attr t=y)."""
    attrs = [{}, {"t": "x"}, {"t": "x"}, {"t": "y"}, {}]
    return HUB.with_attributes(attrs)


def test_gnrw_group_choice_size_proportional():
    g = labelled_hub()
    counts = next_counts(lambda s, sess: step_gnrw(s, sess, ByAttribute("t")), g, 4, 0)
    p_big = (counts[1] + counts[2]) / N_DRAWS
    assert p_big == pytest.approx(2 / 3, abs=0.015)
    assert_uniform_over(counts, [1, 2, 3])


def test_gnrw_forced_group_after_history():
    g = labelled_hub()
    strat = ByAttribute("t")
    counts = next_counts(lambda s, sess: step_gnrw(s, sess, strat), g, 4, 0,
                         lambda s: s.history_S.update({(4, 0): {("v", "x")}}), n=200)
    assert counts == Counter({3: 200})


@pytest.mark.parametrize("history", [set(), {1}, {1, 3}])
def test_single_group_gnrw_matches_cnrw(history):
    def setup(s):
        if history:
            s.history_b[(4, 0)] = set(history)
            s.history_bS[(4, 0, 0)] = set(history)

    gn = next_counts(lambda s, sess: step_gnrw(s, sess, ByHash(1)), HUB, 4, 0, setup)
    cn = next_counts(step_cnrw, HUB, 4, 0, lambda s: s.history_b.update({(4, 0): set(history)}))
    support = sorted(set(HUB.neighbors(0)) - history)
    assert set(gn) == set(cn) == set(support)
    table = [[gn[x] for x in support], [cn[x] for x in support]]
    if len(support) > 1:
        assert stats.chi2_contingency(table).pvalue > 1e-3


def test_size_weighting_is_biased_on_unequal_groups():
    # documented behaviour of the literal size-weighted variant: the singleton group wins half the time
    star = gen_star(3)
    tr = walk("gnrw", AccessSession(star), 1, steps=60_000, seed=1,
              grouping=ByDegreeQuantile(2), weighting="size")
    occ = np.bincount(tr.nodes, minlength=4) / len(tr)
    assert occ[3] == pytest.approx(0.25, abs=0.01)
    tr = walk("gnrw", AccessSession(star), 1, steps=60_000, seed=1, grouping=ByDegreeQuantile(2))
    occ = np.bincount(tr.nodes, minlength=4) / len(tr)
    np.testing.assert_allclose(occ, true_stationary(star), atol=0.005)


def test_hash_groups_deterministic():
    g = gen_complete(12)
    s = AccessSession(g)
    a = make_groups(ByHash(3), 0, g.neighbors(0), s)
    b = make_groups(ByHash(3), 0, g.neighbors(0), AccessSession(g))
    assert a == b
    where = {w: k for k, ms in a.items() for w in ms}
    other = make_groups(ByHash(3), 5, g.neighbors(5), s)
    for k, ms in other.items():
        for w in ms:
            if w in where:
                assert where[w] == k


def test_degree_quantile_split():
    # neighbors 1..4 of node 0 with degrees 1, 5, 9, 10
    edges = [(0, 1), (0, 2), (0, 3), (0, 4)]
    nxt = 5
    for node, extra in ((2, 4), (3, 8), (4, 9)):
        for _ in range(extra):
            edges.append((node, nxt))
            nxt += 1
    g = Graph.from_edges(nxt, edges)
    assert [g.degree(v) for v in (1, 2, 3, 4)] == [1, 5, 9, 10]
    groups = make_groups(ByDegreeQuantile(2), 0, g.neighbors(0), AccessSession(g))
    assert list(groups.values()) == [(1, 2), (3, 4)]


def test_degree_quantile_remainder_to_earlier_buckets():
    g = gen_star(5)
    groups = make_groups(ByDegreeQuantile(2), 0, g.neighbors(0), AccessSession(g))
    assert [len(m) for m in groups.values()] == [3, 2]


def test_attribute_categorical_groups():
    attrs = [{}, {"age": "20"}, {"age": "20"}, {"age": "30"}]
    g = gen_star(3).with_attributes(attrs)
    groups = make_groups(ByAttribute("age"), 0, g.neighbors(0), AccessSession(g))
    assert sorted(len(m) for m in groups.values()) == [1, 2]


def test_attribute_missing_goes_to_own_group():
    attrs = [{}, {"age": 20}, {}, {"age": 30}]
    g = gen_star(3).with_attributes(attrs)
    groups = make_groups(ByAttribute("age"), 0, g.neighbors(0), AccessSession(g))
    assert groups[MISSING] == (2,)


def test_attribute_numeric_buckets_keep_ties_together():
    vals = [None, 5, 5, 5, 9, 1, 7]
    g = gen_star(6).with_attributes([{} if x is None else {"r": x} for x in vals])
    groups = make_groups(ByAttribute("r", 2), 0, g.neighbors(0), AccessSession(g))
    # sorted values 1,5,5,5,7,9: share strictly below -> 0,1/6,1/6,1/6,4/6,5/6
    assert set(groups.values()) == {(1, 2, 3, 5), (4, 6)}


def test_parse_grouping():
    assert parse_grouping("hash:4") == ByHash(4)
    assert parse_grouping("degree:2") == ByDegreeQuantile(2)
    assert parse_grouping("attr:age") == ByAttribute("age")
    assert parse_grouping("attr:age:3") == ByAttribute("age", 3)
    for bad in ("hash", "nope:2", "hash:0", "attr:"):
        with pytest.raises(ValueError):
            parse_grouping(bad)


# --- walks ------------------------------------------------------------------

def test_zero_steps():
    tr = walk("cnrw", AccessSession(gen_path(3)), 2, steps=0)
    assert tr.nodes == [2] and tr.queries == [1]


@pytest.mark.parametrize("kind", ["srw", "mhrw", "nbsrw", "cnrw", "nbcnrw", "gnrw"])
def test_same_seed_same_trace(kind):
    g = gen_barbell(6, 7)
    a = walk(kind, AccessSession(g), 0, steps=2000, seed=42, grouping=ByHash(2))
    b = walk(kind, AccessSession(g), 0, steps=2000, seed=42, grouping=ByHash(2))
    c = walk(kind, AccessSession(g), 0, steps=2000, seed=43, grouping=ByHash(2))
    assert a.nodes == b.nodes and a.queries == b.queries
    assert a.nodes != c.nodes


@pytest.mark.parametrize("kind", ["srw", "mhrw", "nbsrw", "cnrw", "nbcnrw", "gnrw"])
def test_budget_never_exceeded(kind):
    g = gen_barbell(30, 30)
    s = AccessSession(g)
    tr = walk(kind, s, 0, budget=20, seed=1, grouping=ByDegreeQuantile(2))
    assert s.unique_query_count <= 20
    # a step cut short by the budget may still have spent queries on grouping
    assert tr.unique_queries <= s.unique_query_count
    assert tr.budget_terminated


def test_budget_mode_step_cap_on_small_graph():
    tr = walk("srw", AccessSession(gen_complete(3)), 0, budget=20, seed=0)
    assert not tr.budget_terminated
    assert tr.steps == 2000


def test_walk_argument_checks():
    s = AccessSession(gen_path(3))
    with pytest.raises(ValueError):
        walk("srw", s, 0)
    with pytest.raises(ValueError):
        walk("srw", s, 0, steps=3, budget=3)
    with pytest.raises(ValueError):
        walk("gnrw", s, 0, steps=3)


def test_trace_csv_uses_original_ids():
    g = Graph.from_edges(2, [(0, 1)], labels=["alice", "bob"])
    tr = walk("srw", AccessSession(g), 0, steps=2)
    buf = io.StringIO()
    write_trace_csv(tr, g.labels, buf)
    assert buf.getvalue().splitlines() == [
        "step,node_id,unique_queries", "0,alice,1", "1,bob,2", "2,alice,2"]


# --- structural invariants ------------------------------------------------

def _check_history_invariants(state, graph):
    for (u, v), used in state.history_b.items():
        assert used <= set(graph.neighbors(v))
        assert len(used) < graph.degree(v)
    for (u, v), used in state.history_S.items():
        assert used < set(state.groups[v])
    for (u, v, gid), used in state.history_bS.items():
        assert used <= set(state.groups[v][gid])


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.integers(0, 2**32), st.sampled_from(["remaining", "size"]))
def test_gnrw_state_invariants(g, seed, weighting):
    session = AccessSession(g)
    state = WalkerState.start(0, seed)
    for _ in range(400):
        step_gnrw(state, session, ByHash(2), weighting)
        _check_history_invariants(state, g)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.integers(0, 2**32))
def test_cnrw_state_invariants(g, seed):
    session = AccessSession(g)
    state = WalkerState.start(0, seed)
    for _ in range(400):
        step_cnrw(state, session)
    _check_history_invariants(state, g)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.integers(0, 2**32),
       st.sampled_from(["srw", "nbsrw", "cnrw", "nbcnrw", "gnrw", "mhrw"]))
def test_consecutive_nodes_adjacent(g, seed, kind):
    tr = walk(kind, AccessSession(g), 0, steps=300, seed=seed, grouping=ByHash(2))
    for a, b in zip(tr.nodes, tr.nodes[1:]):
        assert g.has_edge(a, b) or (kind == "mhrw" and a == b)
    assert len(tr.nodes) == len(tr.queries) == 301


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.integers(0, 2**32))
def test_nbsrw_no_backtrack_unless_forced(g, seed):
    nodes = walk("nbsrw", AccessSession(g), 0, steps=500, seed=seed).nodes
    for x, y, z in zip(nodes, nodes[1:], nodes[2:]):
        assert x != z or g.degree(y) == 1


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.integers(0, 2**32))
def test_circulation_contracts(g, seed):
    tr = walk("cnrw", AccessSession(g), 0, steps=600, seed=seed)
    assert circulation_violations(tr, g) == []
    tr = walk("nbcnrw", AccessSession(g), 0, steps=600, seed=seed)
    assert circulation_violations(tr, g, non_backtracking=True) == []


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.integers(0, 2**32), st.integers(1, 3))
def test_gnrw_replay_legal(g, seed, m):
    for grouping in (ByHash(m), ByDegreeQuantile(m)):
        tr = walk("gnrw", AccessSession(g), 0, steps=600, seed=seed, grouping=grouping)
        assert gnrw_replay_violations(tr, g, grouping) == []
        assert circulation_violations(tr, g) == []
        tr = walk("gnrw", AccessSession(g), 0, steps=600, seed=seed, grouping=grouping, weighting="size")
        assert gnrw_replay_violations(tr, g, grouping, weighting="size") == []


def test_srw_violates_circulation():
    g = gen_complete(5)
    tr = walk("srw", AccessSession(g), 0, steps=3000, seed=0)
    assert circulation_violations(tr, g)
