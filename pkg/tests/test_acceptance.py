"""The ten acceptance criteria, each checked at its stated tolerance.

Every test records a one-line verdict that the conftest hook prints at the
end of the run.
"""

import math
import random
import time
from fractions import Fraction
from pathlib import Path

import networkx as nx
import pytest

from combforge.connectors import build_connector, hamilton_path, proof_rotation_k
from combforge.embedding import PipelineTrace, embed_avoid
from combforge.experiment import ExperimentConfig, run, success_rates
from combforge.extraction import PipelineError, almost_spanning_pipeline
from combforge.graphs import (
    ExposureSchedule,
    Graph,
    check_ddr,
    check_density,
    check_expander,
    check_pairwise_edge,
    check_small_set_expansion_into,
    expose,
    mindegexp_parameters,
    recheck,
    sample_gnp,
)
from combforge.matching import grouped_graph, hopcroft_karp, max_matching
from combforge.pipelines import DESK, comb_sqrt_probability, embed_teeth_tree, teeth_round_probabilities
from combforge.trees import Tree, divide_vertices, is_subtree, make_comb, random_tree, split_level, split_min_size, split_tree

from . import oracles as O
from .conftest import record

GOLDEN = Path(__file__).parent / "golden" / "comb_sqrt_desk.csv"
CURVE_N = (400, 900, 1600, 2500)


def embeds(adj, tree_edges, mapping) -> bool:
    return len(set(mapping)) == len(mapping) and all(mapping[b] in adj[mapping[a]] for a, b in tree_edges)


def nx_comb(n: int, k: int) -> nx.Graph:
    """Spine path on n/k vertices, each carrying a pendant path of k - 1 further vertices."""
    h = nx.path_graph(n // k)
    nxt = n // k
    for i in range(n // k):
        prev = i
        for _ in range(k - 1):
            h.add_edge(prev, nxt)
            prev, nxt = nxt, nxt + 1
    return h


def is_comb(T: Tree, k: int) -> bool:
    return bool(nx.isomorphism.tree_isomorphism(nx.Graph(T.edges()), nx_comb(T.n, k)))


# ---------------------------------------------------------------- 1


def test_01_oracle_equivalence():
    t0 = time.perf_counter()
    checked = mismatches = 0
    for i in range(500):
        rnd = random.Random(i)
        n = rnd.randint(2, 12)
        p = (0.1, 0.3, 0.6)[i % 3]
        g = sample_gnp(n, p, 1000 + i)
        adj = O.adjacency(n, g.edges())
        verdicts = []
        for m in range(1, n // 2 + 1):
            if m > 3:
                break
            verdicts.append((check_pairwise_edge(g, m), O.pairwise_edge(n, adj, m)))
        for d in (1, 2, 3):
            verdicts.append((check_expander(g, d), O.expander(n, adj, d)))
        for d, D, r in ((1, 2, 2), (2, 3, 2), (1, 1.5, 3)):
            verdicts.append((check_ddr(g, d, D, r), O.ddr(n, adj, d, D, r)))
        A = sorted(rnd.sample(range(n), rnd.randint(1, n)))
        for d in (1, 1.5):
            verdicts.append((check_small_set_expansion_into(g, A, d), O.small_set_into(n, adj, A, d)))
        if n >= 5:
            verdicts.append((check_density(g, 2, 3, p, out_of_regime=True), O.density(n, adj, 2, 3, p)))
        for rep, truth in verdicts:
            checked += 1
            ok = rep.mode in ("exact", "certified") and rep.holds == truth and (rep.holds or recheck(g, rep))
            mismatches += not ok
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed <= 300
    record(1, "oracle equivalence of the graph checkers", ok, f"{checked} verdicts, {mismatches} mismatches, {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 2


def test_02_divide_exhaustive():
    t0 = time.perf_counter()
    trees = bad = 0
    for n in range(2, 11):
        for h in nx.nonisomorphic_trees(n):
            T = Tree.from_graph(Graph(n, h.edges()))
            S1, S2, c = divide_vertices(T)
            trees += 1
            good = (
                S1 | S2 == set(range(n))
                and S1 & S2 == {c}
                and 3 * len(S1) >= n
                and 3 * len(S2) >= n
                and is_subtree(T, S1)
                and is_subtree(T, S2)
                and nx.is_connected(h.subgraph(S1))
                and nx.is_connected(h.subgraph(S2))
            )
            bad += not good
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed <= 60
    record(2, "divide on every tree with 2..10 vertices", ok, f"{trees} trees, {bad} violations, {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------- 3


def reference_level(eps) -> int:
    k, q = 0, Fraction(1)
    while q >= Fraction(eps):
        k, q = k + 1, q * Fraction(3, 4)
    return k


def test_03_split_tree_postconditions():
    t0 = time.perf_counter()
    runs = bad = 0
    for eps in (0.3, 0.5, 0.8):
        k = reference_level(Fraction(eps).limit_denominator(100))
        assert split_level(eps) == k
        n0 = split_min_size(eps)
        for i in range(1000):
            rnd = random.Random(10**6 * int(eps * 10) + i)
            n = rnd.randint(n0, n0 + 100)
            T = random_tree(n, rnd.choice([None, 3, 4]), i)
            L = set(rnd.sample(range(n), rnd.randint(1, n)))
            sp = split_tree(T, L, eps)
            sp.check(T)
            runs += 1
            bad += not (len(sp.S) <= eps * n and len(sp.S & L) * 6**k >= len(L))
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed <= 120
    record(3, "split_tree size and leaf bounds", ok, f"{runs} trees, {bad} violations, {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 4


def connector_paths_ok(g, c, k) -> tuple[int, bool]:
    adj = O.adjacency(g.n, g.edges())
    good = min(len(c.plus), len(c.minus)) >= (c.l - 1) / (4 * k) and not set(c.plus) & set(c.minus)
    count = 0
    for x in c.plus:
        for y in c.minus:
            good &= O.is_hamilton_path(adj, hamilton_path(c, x, y), c.vertices)
            count += 1
    return count, good


def test_04_connector_soundness():
    t0 = time.perf_counter()
    connectors = paths = bad = 0
    K30 = Graph.complete(30)
    for k in (3, 4):
        for l0 in range(7, 16):
            for seed in range(3):
                c = build_connector(K30, l0, range(30), seed=seed, k=k)
                cnt, good = connector_paths_ok(K30, c, k)
                connectors, paths, bad = connectors + 1, paths + cnt, bad + (not good)
    n = 3000
    p = math.log(n) ** 2 / n
    for seed in range(20):
        g = sample_gnp(n, p, seed)
        region = random.Random(seed).sample(range(n), n // 2)
        for k in (3, proof_rotation_k(n)):
            c = build_connector(g, 60, region, seed=seed, k=k)
            assert set(c.vertices) <= set(region)
            cnt, good = connector_paths_ok(g, c, k)
            connectors, paths, bad = connectors + 1, paths + cnt, bad + (not good)
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed <= 300
    record(4, "connector Hamilton-path certificates", ok,
           f"{connectors} connectors, {paths} paths, {bad} bad, {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 5


def matching_ok(adj, nr) -> bool:
    res = hopcroft_karp(adj, nr)
    if res.size != O.max_bipartite_matching(adj, nr):
        return False
    if res.deficiency != O.hall_deficiency(adj):
        return False
    used = list(res.pairs.values())
    if len(used) != len(set(used)) or any(j not in adj[i] for i, j in res.pairs.items()):
        return False
    if res.perfect:
        return res.violator == ()
    S = set(res.violator)
    N = set().union(*(adj[i] for i in S))
    return len(N) < len(S) and len(S) - len(N) == res.deficiency


def test_05_matching_duality():
    t0 = time.perf_counter()
    instances = bad = 0
    for nl in range(0, 5):
        for nr in range(0, 5):
            if nl * nr > 12:
                continue
            cells = [(i, j) for i in range(nl) for j in range(nr)]
            for mask in range(1 << len(cells)):
                adj = [[] for _ in range(nl)]
                for b, (i, j) in enumerate(cells):
                    if mask >> b & 1:
                        adj[i].append(j)
                instances += 1
                bad += not matching_ok(adj, nr)
    rnd = random.Random(5)
    for _ in range(10**4):
        nl, nr = rnd.randint(1, 8), rnd.randint(1, 8)
        q = rnd.random()
        adj = [[j for j in range(nr) if rnd.random() < q] for _ in range(nl)]
        instances += 1
        bad += not matching_ok(adj, nr)
    # the same duality through grouped graphs of a host graph
    for seed in range(200):
        g = sample_gnp(24, 0.08, seed)
        h = grouped_graph(g, [{i, i + 1} for i in range(0, 12, 2)], [{i, i + 1, i + 2} for i in range(12, 24, 3)])
        adj = [[j for (i2, j) in h.edges() if i2 == i] for i in range(h.n_left)]
        res = max_matching(h)
        instances += 1
        bad += res.size != O.max_bipartite_matching(adj, h.n_right)
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed <= 120
    record(5, "matching size and Hall violators", ok, f"{instances} instances, {bad} bad, {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 6


def avoid_postconditions(g, T1, T2, Z, res, s, l) -> bool:
    adj = O.adjacency(g.n, g.edges())
    m1, m2 = list(res.emb1.mapping), list(res.emb2.mapping)
    if not (embeds(adj, T1.edges(), m1) and embeds(adj, T2.edges(), m2)):
        return False
    used = m1 + m2
    for path in res.paths:
        if len(path) != l or path[0] not in Z or path[-1] not in Z:
            return False
        if any(path[i + 1] not in adj[path[i]] for i in range(l - 1)):
            return False
        used += path
    return len(res.paths) == s and len(used) == len(set(used)) == g.n


def test_06_embed_avoid_accounting():
    t0 = time.perf_counter()
    shapes = [(4, 20), (5, 17), (3, 27)]
    n = 400
    done = attempts = bad = 0
    while done < 50 and attempts < 100:
        s, l = shapes[attempts % 3]
        seed = attempts
        attempts += 1
        g = sample_gnp(n, 0.5, seed)
        rest = n - s * l
        T1 = random_tree(rest // 2 - 7, 4, seed)
        T2 = random_tree(rest - T1.n, 4, seed + 100)
        Z = set(range(5, n))
        try:
            res = embed_avoid(g, T1, T2, Z, 0, 1, s, l, seed=seed, partition_policy=DESK.partition_policy)
        except PipelineError:
            continue
        done += 1
        h, H = s // 2, -(-s // 2)
        z5 = H * -(-l // 2) if s % 2 == 0 else H * l - h * (l // 2)
        sizes = {key: len(res.parts[key]) for key in ("Z1", "Z3", "Z4", "Z5")}
        w3 = int(next(st for st in res.trace.stages if st["stage"] == "paths")["W3"])
        good = (
            sizes == {"Z1": 2 * n // 3, "Z3": s * l // 8, "Z4": h * (l // 2) + 2 * h, "Z5": z5}
            and w3 == h * (l - 2)
            and avoid_postconditions(g, T1, T2, Z, res, s, l)
        )
        bad += not good
    elapsed = time.perf_counter() - t0
    ok = done >= 50 and bad == 0 and elapsed <= 600
    record(6, "embed_avoid part sizes and postconditions", ok,
           f"{done} completed of {attempts}, {bad} bad, {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 7 and 8


@pytest.fixture(scope="module")
def comb_sweep(tmp_path_factory):
    art = tmp_path_factory.mktemp("comb_artifacts")
    t0 = time.perf_counter()
    cfg = ExperimentConfig("comb_sqrt", CURVE_N, seeds=20, profile="desk", keep_artifacts=str(art))
    text = run(cfg)
    return text, art, time.perf_counter() - t0


def test_07_pipeline_soundness(comb_sweep):
    _, art, _ = comb_sweep
    checked = bad = 0
    combs = {}
    for emb_path in sorted(art.glob("*.emb")):
        tr = PipelineTrace.from_text(emb_path.with_suffix(".trace").read_text())
        n, seed = int(tr.params["n"]), int(tr.params["seed"])
        q = math.isqrt(n)
        p = comb_sqrt_probability(n, DESK)
        G = expose(ExposureSchedule((p, p, p), seed), n).union
        if n not in combs:
            combs[n] = make_comb(n, q)
            assert is_comb(combs[n], q)
        lines = emb_path.read_text().split("\n")[1:-1]
        mapping = [int(ln.split()[1]) for ln in lines]
        checked += 1
        bad += not embeds(O.adjacency(n, G.edges()), combs[n].edges(), mapping)
    # teeth pipeline at desk scale
    T = make_comb(400, 20)
    assert is_comb(T, 20)
    for seed in range(4):
        try:
            res = embed_teeth_tree(T, 19, 1.0, seed)
        except PipelineError:
            continue
        rounds = teeth_round_probabilities(400, 1.0, DESK)
        G = expose(ExposureSchedule(rounds, seed), 400).union
        checked += 1
        bad += not embeds(O.adjacency(400, G.edges()), T.edges(), list(res.embedding.mapping))
    # almost-spanning trees
    for seed in range(5):
        g = sample_gnp(500, 20 / 500, seed)
        T = random_tree(400, 3, seed)
        try:
            emb = almost_spanning_pipeline(g, T, 0.2, seed)
        except PipelineError:
            continue
        checked += 1
        bad += not embeds(O.adjacency(500, g.edges()), T.edges(), list(emb.mapping))
    ok = bad == 0 and checked > 0
    record(7, "every returned embedding is a valid comb or tree copy", ok, f"{checked} embeddings, {bad} invalid")
    assert ok


def test_08_threshold_curve(comb_sweep):
    text, _, elapsed = comb_sweep
    rates = {n: r for (n, _), r in success_rates(text).items()}
    curve = [rates[n] for n in CURVE_N]
    monotone = all(a <= b for a, b in zip(curve, curve[1:]))
    golden = GOLDEN.read_text() == text
    ok = monotone and curve[-1] >= 0.7 and golden and elapsed <= 1800
    record(8, "comb success curve is non-decreasing and >= 0.7 at n=2500", ok,
           "rates " + " ".join(f"{n}:{r:.2f}" for n, r in zip(CURVE_N, curve))
           + f", golden {'matches' if golden else 'differs'}, {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 9


def test_09_mindegexp():
    t0 = time.perf_counter()
    n = 1000
    p = math.log(n) ** 2 / n
    prm = mindegexp_parameters(n, p, 4, 23.0, 0.05)
    failures = 0
    modes = set()
    for seed in range(100):
        rep = check_ddr(sample_gnp(n, p, seed), prm["d"], prm["D"], prm["r"], seed=seed)
        failures += not rep.holds
        modes.add(rep.notes or rep.mode)
    elapsed = time.perf_counter() - t0
    ok = failures <= 5 and elapsed <= 600
    record(9, "(d, D, r)-property of G(1000, log^2 n/n)", ok,
           f"{failures}/100 failures, D={prm['D']:.1f}, r={prm['r']}, via {'/'.join(sorted(modes))}, {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 10


def test_10_determinism(tmp_path):
    configs = [
        dict(pipeline="comb_sqrt", n_grid=(400, 900), seeds=5),
        dict(pipeline="teeth_tree", n_grid=(400,), k_grid=(19,), seeds=2),
    ]
    same = True
    files = 0
    for i, kw in enumerate(configs):
        outs = []
        for rep in ("a", "b"):
            d = tmp_path / f"{i}{rep}"
            text = run(ExperimentConfig(keep_artifacts=str(d), threads=1 if rep == "a" else 2, **kw))
            blobs = {f.name: f.read_bytes() for f in sorted(d.glob("*"))} if d.exists() else {}
            outs.append((text, blobs))
        files += len(outs[0][1])
        same &= outs[0] == outs[1]
    record(10, "re-runs give byte-identical CSV and embedding files", same, f"{files} artifact files compared")
    assert same
