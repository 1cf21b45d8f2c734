import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combforge.graphs import Graph, sample_gnp
from combforge.matching import d_matching, grouped_graph, hopcroft_karp, max_matching

from . import oracles as O


@st.composite
def bipartite(draw, max_side=8):
    nl = draw(st.integers(0, max_side))
    nr = draw(st.integers(0, max_side))
    adj = [sorted(draw(st.sets(st.integers(0, nr - 1)))) if nr else [] for _ in range(nl)]
    return adj, nr


def check_violator(adj, res):
    if res.perfect:
        assert res.violator == ()
        return
    S = set(res.violator)
    N = set().union(*(adj[i] for i in S)) if S else set()
    assert len(N) < len(S)
    assert set(res.violator_neighbors) == N
    assert len(S) - len(N) == res.deficiency


# ---------------------------------------------------------------- grouped graphs


def test_grouped_graph_single_edge():
    g = Graph(4, [(2, 3)])
    h = grouped_graph(g, [{1, 2}], [{3}])
    assert h.edges() == [(0, 0)] and h.witness_edge(0, 0) == (2, 3)


def test_grouped_graph_without_crossing_edges():
    g = Graph(6, [(0, 1), (4, 5)])
    assert grouped_graph(g, [{0, 1}], [{4, 5}]).edges() == []


def test_grouped_graph_wraps_integers():
    h = grouped_graph(Graph.complete(3), [0], [1, 2])
    assert h.left == (frozenset({0}),) and h.edges() == [(0, 0), (0, 1)]


def test_grouped_graph_rejects_overlaps():
    with pytest.raises(ValueError):
        grouped_graph(Graph.complete(4), [{0, 1}, {1, 2}], [{3}])
    with pytest.raises(ValueError):
        grouped_graph(Graph.complete(4), [{0, 1}], [{1, 3}])


def test_grouped_graph_overlap_ignores_shared_vertices():
    g = Graph(4, [(0, 1), (1, 2)])
    h = grouped_graph(g, [{0, 1}], [{1, 2}], allow_overlap=True)
    # the only crossing pairs touch the shared vertex 1
    assert h.edges() == []


def test_grouped_graph_matches_double_loop():
    g = sample_gnp(100, 0.3, 2)
    rnd = random.Random(4)
    verts = list(range(100))
    rnd.shuffle(verts)
    left = [set(verts[i:i + 5]) for i in range(0, 50, 5)]
    right = [set(verts[i:i + 7]) for i in range(50, 99, 7)]
    h = grouped_graph(g, left, right)
    expect = [(i, j) for i, L in enumerate(left) for j, R in enumerate(right) if any(g.has_edge(x, y) for x in L for y in R)]
    assert h.edges() == expect


# ---------------------------------------------------------------- maximum matching


def test_identity_matching_is_perfect():
    res = hopcroft_karp([[i] for i in range(6)], 6)
    assert res.perfect and res.pairs == {i: i for i in range(6)}


def test_two_lefts_sharing_one_right():
    res = hopcroft_karp([[0], [0]], 2)
    assert res.size == 1 and res.violator == (0, 1) and res.violator_neighbors == (0,)


def test_random_12_by_12_matches_brute_force():
    rnd = random.Random(12)
    for _ in range(20):
        adj = [sorted(rnd.sample(range(12), rnd.randint(0, 3))) for _ in range(12)]
        res = hopcroft_karp(adj, 12)
        assert res.size == O.max_bipartite_matching(adj, 12)
        check_violator(adj, res)


@given(bipartite())
@settings(max_examples=300, deadline=None)
def test_matching_duality(inst):
    adj, nr = inst
    res = hopcroft_karp(adj, nr)
    assert res.size == O.max_bipartite_matching(adj, nr)
    assert res.size == len(adj) - O.hall_deficiency(adj)
    check_violator(adj, res)


def test_max_matching_on_grouped_graph():
    g = Graph(6, [(0, 3), (1, 4), (2, 5), (0, 4)])
    h = grouped_graph(g, [0, 1, 2], [3, 4, 5])
    assert max_matching(h).perfect


# ---------------------------------------------------------------- d-matchings


def test_d_matching_complete_bipartite():
    g = Graph(10, [(a, b) for a in range(5) for b in range(5, 10)])
    out, viol = d_matching(g, range(5), range(5, 10), 1)
    assert viol == () and sorted(x for xs in out.values() for x in xs) == list(range(5, 10))


def test_d_matching_low_degree_vertex_is_violator():
    g = Graph(6, [(0, 3), (1, 4), (1, 5)])
    out, viol = d_matching(g, [0, 1], [3, 4, 5], 2)
    assert out is None and viol == (0,)


def test_d_matching_rejects_overlap():
    with pytest.raises(ValueError):
        d_matching(Graph.complete(4), [0, 1], [1, 2], 1)


def test_d_matching_random_against_brute_force():
    rnd = random.Random(6)
    for trial in range(30):
        g = sample_gnp(26, 0.15, trial)
        A, B = list(range(6)), list(range(6, 26))
        out, viol = d_matching(g, A, B, 2)
        NB = [set(g.neighbors(a)) & set(B) for a in A]
        feasible = all(
            len(set().union(*(NB[i] for i in S))) >= 2 * len(S)
            for r in range(1, 7)
            for S in itertools.combinations(range(6), r)
        )
        assert (out is not None) == feasible
        if out is not None:
            used = [x for xs in out.values() for x in xs]
            assert len(used) == len(set(used)) == 12
            assert all(set(out[a]) <= NB[a] for a in A)
        else:
            S = set(viol)
            assert len(set().union(*(NB[a] for a in S))) < 2 * len(S)
        rnd.random()


# ---------------------------------------------------------------- final-matching case analysis


def _final_matching_instance(rnd, c, q, m2, p):
    """Left: classes C; right: D (c - q classes) and Q (q singletons)."""
    d = c - q
    adj_D = [set(j for j in range(c) if rnd.random() < p) for _ in range(d)]
    adj_Q = [set(j for j in range(c) if rnd.random() < p) for _ in range(q)]
    return adj_D, adj_Q


def _satisfies_expansion_facts(adj_D, adj_Q, c, m2):
    d = len(adj_D)
    for r in range(1, d + 1):
        for X in itertools.combinations(range(d), r):
            N = set().union(*(adj_D[i] for i in X))
            if r <= 2 * m2 and len(N) < 2 * r:
                return False
            if r >= m2 and len(N) < c - m2:
                return False
    cols = [{i for i in range(d) if j in adj_D[i]} for j in range(c)]
    for r in range(1, m2 + 1):
        for V in itertools.combinations(range(c), r):
            if len(set().union(*(cols[j] for j in V))) < r:
                return False
    for r in range(1, len(adj_Q) + 1):
        for X in itertools.combinations(range(len(adj_Q)), r):
            if len(set().union(*(adj_Q[i] for i in X))) < 4 * r:
                return False
    return True


def test_final_matching_hall_cases_admit_perfect_matchings():
    rnd = random.Random(2024)
    accepted = 0
    for _ in range(8000):
        c, q, m2 = 10, 2, 2
        adj_D, adj_Q = _final_matching_instance(rnd, c, q, m2, rnd.choice([0.35, 0.45, 0.6]))
        if not _satisfies_expansion_facts(adj_D, adj_Q, c, m2):
            continue
        accepted += 1
        right_side = [sorted(s) for s in adj_D + adj_Q]
        res = hopcroft_karp(right_side, c)
        assert res.perfect, (adj_D, adj_Q)
    assert accepted >= 50
