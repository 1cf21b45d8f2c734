import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combforge.embedding import validate
from combforge.extraction import (
    ExtractionError,
    PartitionError,
    PipelineError,
    almost_spanning_pipeline,
    check_bcps,
    check_partition,
    cll_inequality,
    extract_expander_subgraph,
    partition_degree_proportional,
)
from combforge.graphs import Graph, recheck, sample_gnp
from combforge.trees import Tree, random_tree

from . import oracles as O

K8_EDGES = [(i, j) for i in range(8) for j in range(i + 1, 8)]


def two_cliques(k: int) -> Graph:
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    edges += [(i + k, j + k) for i, j in edges]
    return Graph(2 * k, edges)


# ---------------------------------------------------------------- extraction


def test_extract_keeps_expanding_graph():
    ext = extract_expander_subgraph(Graph.complete(8), 2, 1)
    assert ext.H == frozenset(range(8)) and ext.removed == ()


def test_extract_drops_isolated_vertex():
    ext = extract_expander_subgraph(Graph(9, K8_EDGES), 1, 1)
    assert ext.H == frozenset(range(8))


def test_extract_drops_pendant_path():
    g = Graph(10, K8_EDGES + [(0, 8), (8, 9)])
    ext = extract_expander_subgraph(g, 2, 2)
    assert ext.H == frozenset(range(8))
    # brute force: {8, 9} is the only non-expanding set of size <= 2 once nothing is removed
    adj = O.adjacency(10, g.edges())
    bad = [X for s in (1, 2) for X in itertools.combinations(range(10), s) if len(O.nbhd(adj, X)) < 2 * s]
    assert set().union(*map(set, bad)) == {8, 9}


def test_extract_fails_loudly_when_hypothesis_fails():
    with pytest.raises(ExtractionError):
        extract_expander_subgraph(Graph(10, [(0, 1)]), 2, 1)


@given(st.integers(5, 12), st.floats(0.2, 0.9), st.integers(0, 10**6), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_extract_output_expands_exhaustively(n, p, seed, m):
    g = sample_gnp(n, p, seed)
    try:
        ext = extract_expander_subgraph(g, m, 1, seed=seed)
    except ExtractionError:
        return
    assert len(ext.removed) <= m
    H = sorted(ext.H)
    sub, _ = g.induced(H)
    adj = O.adjacency(sub.n, sub.edges())
    for s in range(1, min(m, sub.n) + 1):
        for X in itertools.combinations(range(sub.n), s):
            assert len(O.nbhd(adj, X)) >= s


# ---------------------------------------------------------------- partitions


def test_partition_complete_graph():
    part = partition_degree_proportional(Graph.complete(10), range(10), 5, 5, 9)
    assert len(part.A) == 5 and len(part.B) == 5 and not part.violators
    assert check_partition(Graph.complete(10), part.A, part.B) == ()


def test_partition_cycle_needs_period_four_split():
    c12 = Graph.cycle(12)
    # alternating sides put both neighbours of every vertex on the other side
    assert check_partition(c12, range(0, 12, 2), range(1, 12, 2)) == tuple(range(12))
    A = [v for v in range(12) if v % 4 in (0, 1)]
    assert check_partition(c12, A, sorted(set(range(12)) - set(A))) == ()
    part = partition_degree_proportional(c12, range(12), 6, 6, 2)
    assert check_partition(c12, part.A, part.B) == ()


def test_partition_reports_lonely_vertex():
    g = Graph(7, [(0, 1)] + [(1, i) for i in range(2, 7)])
    with pytest.raises(PartitionError) as info:
        partition_degree_proportional(g, range(7), 3, 4, 1)
    assert 0 in info.value.best.violators


def test_partition_rejects_bad_sizes():
    with pytest.raises(ValueError):
        partition_degree_proportional(Graph.complete(6), range(6), 2, 3, 1)


def test_cll_inequality_value():
    assert cll_inequality(3, 5, 5, 2) == pytest.approx(9 * 2 * 2 * math.exp(1 - 25 * 2 / 500))


@given(st.integers(12, 40), st.integers(0, 10**6), st.data())
@settings(max_examples=30, deadline=None)
def test_returned_partitions_satisfy_degree_conditions(n, seed, data):
    g = sample_gnp(n, 0.6, seed)
    a = data.draw(st.integers(2, n - 2))
    try:
        part = partition_degree_proportional(g, range(n), a, n - a, 1, seed, max_attempts=30)
    except PartitionError:
        return
    assert len(part.A) == a and len(part.B) == n - a
    A, B = set(part.A), set(part.B)
    for v in range(n):
        dY = g.degree(v)
        assert 3 * n * len(g.neighbor_set(v) & A) >= a * dY
        assert 3 * n * len(g.neighbor_set(v) & B) >= (n - a) * dY


# ---------------------------------------------------------------- BCPS


def test_bcps_examples():
    assert check_bcps(Graph.complete(12), 0.25, 0.5).holds
    rep = check_bcps(two_cliques(5), 0.5, 0.5)
    assert not rep.holds and rep.witness == ((0, 1, 2, 3, 4), (5, 6, 7, 8, 9))
    assert recheck(two_cliques(5), rep)
    with pytest.raises(ValueError):
        check_bcps(Graph.complete(4), 0.5, 0.25)


def test_bcps_sampled_verdict_cross_checked_on_subgraph():
    g = sample_gnp(100, 0.5, 3)
    rep = check_bcps(g, 0.2, 0.2)
    assert rep.holds and rep.mode == "sampled"
    sub, _ = g.induced(range(16))
    exact = check_bcps(sub, 0.2, 0.2)
    assert exact.mode == "exact"
    adj = O.adjacency(16, sub.edges())
    oracle = all(O.crossing(adj, B, C) > 0 for B, C in O.disjoint_pairs(16, 4, 4))
    assert exact.holds == oracle


@given(st.integers(6, 12), st.integers(0, 10**6), st.data())
@settings(max_examples=30, deadline=None)
def test_bcps_edge_monotone(n, seed, data):
    g = sample_gnp(n, 0.3, seed)
    if check_bcps(g, 0.25, 0.25).holds:
        missing = [(u, v) for u in range(n) for v in range(u + 1, n) if not g.has_edge(u, v)]
        extra = data.draw(st.lists(st.sampled_from(missing), unique=True)) if missing else []
        assert check_bcps(g.with_edges(extra), 0.25, 0.25).holds


# ---------------------------------------------------------------- almost-spanning pipeline


def test_almost_spanning_complete_host():
    emb = almost_spanning_pipeline(Graph.complete(50), Tree.from_graph(Graph.path(40)), 0.2)
    assert validate(Graph.complete(50), Graph.path(40), emb).holds


def test_almost_spanning_rejects_large_tree():
    with pytest.raises(ValueError):
        almost_spanning_pipeline(Graph.complete(50), Tree.from_graph(Graph.path(45)), 0.2)


def test_almost_spanning_sparse_random_graphs():
    ok = 0
    for seed in range(20):
        g = sample_gnp(500, 20 / 500, seed)
        T = random_tree(400, 3, seed)
        try:
            emb = almost_spanning_pipeline(g, T, 0.2, seed)
        except PipelineError:
            continue
        assert validate(g, T, emb).holds
        ok += 1
    assert ok >= 18


def test_almost_spanning_stage_tagged_failure():
    # two disjoint cliques cannot host a spanning-ish path
    g = two_cliques(30)
    with pytest.raises(PipelineError) as info:
        almost_spanning_pipeline(g, Tree.from_graph(Graph.path(45)), 0.2)
    assert info.value.stage in ("extract", "embed")
