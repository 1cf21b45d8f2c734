import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combforge.embedding import (
    Embedding,
    EmbeddingError,
    PipelineTrace,
    avoid_part_sizes,
    check_avoid,
    embed_avoid,
    embed_tree_in_expander,
    validate,
)
from combforge.extraction import PipelineError
from combforge.graphs import Graph, sample_gnp
from combforge.trees import Tree, random_tree

from . import oracles as O


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# ---------------------------------------------------------------- validate


def test_identity_path_in_cycle_holds():
    assert validate(Graph.cycle(5), Graph.path(5), list(range(5))).holds


def test_collision_witness():
    rep = validate(Graph.complete(5), Graph.path(3), [0, 1, 0])
    assert not rep.holds and rep.condition == "collision" and rep.witness == ((0, 2),)


def test_missing_edge_witness():
    rep = validate(Graph.path(4), Graph.path(3), [0, 2, 3])
    assert not rep.holds and rep.condition == "edge" and rep.witness == ((0, 1),)


def test_unmapped_and_out_of_range():
    assert validate(Graph.complete(4), Graph.path(3), {0: 0, 1: 1}).condition == "unmapped"
    assert validate(Graph.complete(4), Graph.path(3), [0, 1, 7]).condition == "out_of_range"


def test_embedding_text_round_trip():
    e = Embedding((3, 0, 2), 5)
    assert Embedding.from_text(e.to_text(), 5) == e
    with pytest.raises(ValueError):
        Embedding.from_text("embedding 2\n0 1\n", 5)
    with pytest.raises(ValueError):
        Embedding.from_text("embedding 2\n0 1\n0 2\n", 5)


# ---------------------------------------------------------------- greedy embedder


@given(st.integers(1, 10), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_any_tree_embeds_in_k10(size, seed):
    T = random_tree(size, None, seed)
    e = embed_tree_in_expander(Graph.complete(10), T, 3, 0, seed)
    assert e[0] == 3
    assert validate(Graph.complete(10), T, e).holds


def test_star_cannot_host_p4():
    g = star_graph(6)
    assert not O.tree_contains_p4_in_star(6)
    for v in range(g.n):
        for t in range(4):
            with pytest.raises(EmbeddingError):
                embed_tree_in_expander(g, Graph.path(4), v, t, seed=v, restarts=2)


def test_embedding_respects_allowed_set():
    g = Graph.complete(20)
    e = embed_tree_in_expander(g, Graph.path(8), 19, 0, allowed=range(10, 20))
    assert e.image() <= set(range(10, 20)) and e[0] == 19


def test_random_sparse_hosts():
    ok = 0
    for seed in range(20):
        g = sample_gnp(300, 25 / 300, seed)
        T = random_tree(240, 3, seed)
        try:
            e = embed_tree_in_expander(g, T, 0, 0, seed)
        except EmbeddingError:
            continue
        assert validate(g, T, e).holds
        ok += 1
    assert ok >= 18


def test_embedder_is_deterministic():
    g = sample_gnp(200, 0.06, 1)
    T = random_tree(150, 3, 1)
    assert embed_tree_in_expander(g, T, 0, 0, 4) == embed_tree_in_expander(g, T, 0, 0, 4)


# ---------------------------------------------------------------- traces


def test_trace_round_trip():
    tr = PipelineTrace("demo", {"n": 10, "eps": 0.5})
    tr.record("expose", round=1, edges=12)
    tr.record("paths", lengths=[3, 4])
    back = PipelineTrace.from_text(tr.to_text())
    assert back.pipeline == "demo" and back.to_text() == tr.to_text()
    assert back.stages[1]["lengths"] == "3,4"


# ---------------------------------------------------------------- embed_avoid


def test_part_sizes_match_formulas():
    for n, s, l in [(400, 4, 20), (400, 5, 17), (2000, 8, 50), (30, 2, 5)]:
        z = avoid_part_sizes(n, s, l)
        h, H = s // 2, math.ceil(s / 2)
        assert z["Z1"] == 2 * n // 3 and z["Z3"] == s * l // 8
        assert z["Z4"] == h * (l // 2) + 2 * h
        assert z["W3"] == h * (l - 2)
        # unused part of Z4 plus Z5 holds the last ⌈s/2⌉ paths exactly
        assert z["Z4"] - 2 * h + z["Z5"] == H * l
        if s % 2 == 0:
            assert z["Z5"] == H * math.ceil(l / 2)


def test_degenerate_trees_give_a_path_cover():
    one = Tree.from_graph(Graph(1, []))
    g = Graph.complete(22)
    res = embed_avoid(g, one, one, range(2, 22), 0, 1, 4, 5, seed=0)
    assert res.emb1.mapping == (0,) and res.emb2.mapping == (1,)
    assert sorted(v for p in res.paths for v in p) == list(range(2, 22))
    check_avoid(g, Graph(1, []), Graph(1, []), set(range(2, 22)), res, 4, 5)


@pytest.mark.parametrize("seed", range(5))
def test_k30_small_trees(seed):
    g = Graph.complete(30)
    T1, T2 = random_tree(8, 3, seed), random_tree(12, 3, seed + 1)
    Z = set(range(2, 30))
    res = embed_avoid(g, T1, T2, Z, 0, 1, 2, 5, seed=seed, partition_policy="best")
    check_avoid(g, T1, T2, Z, res, 2, 5)
    assert res.emb1[0] == 0 and res.emb2[0] == 1
    sizes = avoid_part_sizes(30, 2, 5)
    for key in ("Z1", "Z3", "Z4", "Z5"):
        assert len(res.parts[key]) == sizes[key]


def test_anchors_are_honored_when_trees_swap():
    g = Graph.complete(30)
    T1, T2 = random_tree(12, 3, 0), random_tree(8, 3, 1)
    res = embed_avoid(g, T1, T2, range(2, 30), 0, 1, 2, 5, seed=0, t1=5, t2=3, partition_policy="best")
    assert res.emb1[5] == 0 and res.emb2[3] == 1
    assert len(res.emb1) == 12 and len(res.emb2) == 8


def test_embed_avoid_rejects_bad_inputs():
    g = Graph.complete(30)
    T1, T2 = random_tree(8, 3, 0), random_tree(12, 3, 1)
    with pytest.raises(ValueError):
        embed_avoid(g, T1, T2, range(2, 30), 0, 1, 3, 5)
    with pytest.raises(ValueError):
        embed_avoid(g, T1, T2, range(1, 30), 0, 1, 2, 5)
    with pytest.raises(ValueError):
        embed_avoid(g, T1, T2, range(2, 30), 0, 0, 2, 5)


def test_dense_random_host():
    n, s, l = 400, 4, 20
    ok = 0
    for seed in range(5):
        g = sample_gnp(n, 0.5, seed)
        rest = n - s * l
        T1 = random_tree(rest // 2 - 7, 4, seed)
        T2 = random_tree(rest - T1.n, 4, seed + 100)
        Z = set(range(5, n))
        try:
            res = embed_avoid(g, T1, T2, Z, 0, 1, s, l, seed=seed)
        except PipelineError as exc:
            assert exc.stage in ("partition", "embed_T1", "embed_T2", "cycle_W3", "match_Z4", "cycle_W4")
            continue
        check_avoid(g, T1, T2, Z, res, s, l)
        ok += 1
    assert ok >= 4


def test_sparse_host_fails_with_stage_tag():
    # at degree ~23 the residue W3 has vertices with < 2 neighbours inside it
    n, s, l = 2000, 8, 50
    g = sample_gnp(n, 3 * math.log(n) / n, 0)
    T1 = random_tree(790, 3, 0)
    T2 = random_tree(n - s * l - 790, 3, 1)
    with pytest.raises(PipelineError) as info:
        embed_avoid(g, T1, T2, range(2, n), 0, 1, s, l, seed=0, partition_policy="best")
    assert info.value.stage == "cycle_W3"
    assert info.value.trace.stages[0]["stage"] == "diagnostics"
