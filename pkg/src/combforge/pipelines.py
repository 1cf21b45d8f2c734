"""End-to-end comb embeddings in multi-round random graphs.

Both pipelines sample their rounds from one seed, build connectors, paths and
matchings stage by stage, and assemble a map from the requested tree into the
union graph that is validated before it is returned.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from .connectors import (
    ConnectorError,
    PathSearchError,
    build_connector,
    find_path,
    hamilton_path,
    posa_hamilton_cycle,
    proof_rotation_k,
)
from .embedding import Embedding, PipelineTrace, embed_avoid, embed_tree_in_expander, validate, EmbeddingError
from .extraction import ExtractionError, PipelineError, extract_expander_subgraph
from .graphs import ExposureSchedule, Graph, derive_seed, expose
from .matching import grouped_graph, max_matching
from .trees import Tree, comb_tooth, find_teeth, make_comb, split_spines, teeth_inside

COMB_SQRT_STAGES = ("expose", "connectors", "spine", "hamilton_cycle", "matching_spine", "matching_teeth", "assemble")
TEETH_STAGES = (
    "teeth", "split", "connectors", "independent_edges", "good_vertices", "embed_core", "attach",
    "hall_sets", "avoid", "final_matching", "assemble",
)


@dataclass(frozen=True)
class Profile:
    """Every constant the pipelines use.

    ``asymptotic`` evaluates the formulas of the proofs; ``desk`` replaces the
    ones that are vacuous at n ≤ 10⁴.  ``boost`` multiplies every round
    probability of the comb pipeline, ``teeth_boost`` rounds 1-4 of the teeth
    pipeline and ``final_boost`` its round 5.  Fields left at ``None`` take
    the proof's value.
    """

    name: str
    boost: float = 1.0
    teeth_boost: float = 1.0
    final_boost: float = 1.0
    rotation_k: int | None = None
    connector_m: int | None = None
    cycle_offsets: int = 1
    # teeth pipeline
    split_divisor: float = 14.0
    s1_cap: int | None = None
    s2_ratio: float | None = None
    connectors_per_family: int | None = None
    indep_to_a1: bool = False
    expansion: float = 4.0
    good_threshold: float | None = None
    path_end_threshold: float | None = None
    extraction_factor: float | None = None
    partition_policy: str = "strict"
    g3_reduction: float = 1.0
    b5_factor: float = 2.0

    def k_for(self, n: int) -> int:
        return proof_rotation_k(n) if self.rotation_k is None else self.rotation_k


ASYMPTOTIC = Profile("asymptotic")
DESK = Profile(
    "desk",
    boost=2.5,
    teeth_boost=100.0,
    final_boost=100.0,
    rotation_k=3,
    cycle_offsets=4,
    split_divisor=2.0,
    s1_cap=12,
    s2_ratio=1 / 4,
    indep_to_a1=True,
    expansion=1.0,
    good_threshold=2.0,
    path_end_threshold=0.0,
    extraction_factor=1.0,
    partition_policy="best",
)
PROFILES = {"desk": DESK, "asymptotic": ASYMPTOTIC}


def get_profile(profile: str | Profile) -> Profile:
    if isinstance(profile, Profile):
        return profile
    try:
        return PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}") from None


@dataclass
class PipelineResult:
    embedding: Embedding
    trace: PipelineTrace
    graph: Graph
    tree: Tree


def _digest(items) -> str:
    h = hashlib.sha256()
    for it in items:
        h.update((",".join(map(str, it)) + ";").encode())
    return h.hexdigest()[:16]


def _fail(stage: str, message: str, trace: PipelineTrace):
    trace.record("failed", at=stage, reason=message.replace(" ", "_")[:120])
    return PipelineError(stage, message, trace)


# ---------------------------------------------------------------- Comb_{n,√n}


def comb_sqrt_probability(n: int, profile: Profile) -> float:
    """Per-round probability boost·log²n / 3n (capped at 1)."""
    return min(1.0, profile.boost * math.log(n) ** 2 / (3 * n))


def embed_comb_sqrt(n: int, seed: int, profile: str | Profile = "desk", *, timing: bool = False) -> PipelineResult:
    """Embed make_comb(n, √n) in the union of three random rounds.

    Round 1 gives √n disjoint connectors of ⌈(√n-1)/2⌉ vertices and the spine
    Q; round 2 gives a Hamilton cycle on the rest, cut into √n paths R_j of
    ⌊(√n-1)/2⌋ vertices.  Two grouped-graph matchings (spine vertices to
    connector H⁺ sets, connector H⁻ sets to path ends) on the union graph pick,
    for spine vertex q_i, a connector P and a path R_j; the tooth is
    q_i, a Hamilton path of P, then R_j.
    """
    prof = get_profile(profile)
    q = math.isqrt(n)
    if q * q != n or q < 3:
        raise ValueError("n must be a perfect square of an integer >= 3")
    p = comb_sqrt_probability(n, prof)
    sched = ExposureSchedule((p, p, p), seed)
    trace = PipelineTrace("comb_sqrt", {"n": n, "seed": seed, "profile": prof.name, "boost": prof.boost},
                          timing=timing)
    ex = expose(sched, n)
    G1, G2, _ = ex.rounds
    G = ex.union
    trace.record("expose", rounds=3, p_round=p, p_effective=sched.composite_probability(),
                 edges=[r.m for r in ex.rounds])
    l = math.ceil((q - 1) / 2)
    rlen = (q - 1) // 2
    k = prof.k_for(n)
    free = set(range(n))
    conns = []
    for i in range(q):
        try:
            c = build_connector(G1, l, free, seed=derive_seed(seed, 100, i), k=k, m=prof.connector_m)
        except (ConnectorError, PathSearchError, ValueError) as exc:
            raise _fail("connectors", f"connector {i}: {exc}", trace) from exc
        conns.append(c)
        free -= set(c.vertices)
    trace.record("connectors", count=q, l=l, k=k, min_plus=min(len(c.plus) for c in conns),
                 min_minus=min(len(c.minus) for c in conns), digest=_digest(c.vertices for c in conns))
    try:
        Q = find_path(G1, free, q, seed=derive_seed(seed, 200))
    except PathSearchError as exc:
        raise _fail("spine", str(exc), trace) from exc
    free -= set(Q)
    trace.record("spine", vertices=len(Q), digest=_digest([Q]))
    W = sorted(free)
    assert len(W) == q * rlen
    try:
        cyc = posa_hamilton_cycle(G2, derive_seed(seed, 300), vertices=W) if len(W) >= 3 else list(W)
    except PathSearchError as exc:
        raise _fail("hamilton_cycle", str(exc), trace) from exc
    trace.record("hamilton_cycle", vertices=len(cyc), digest=_digest([cyc]))

    h1 = grouped_graph(G, Q, [c.plus for c in conns])
    m1 = max_matching(h1)
    if not m1.perfect:
        raise _fail("matching_spine", f"deficiency {m1.deficiency}, Hall violator {list(m1.violator)}", trace)
    trace.record("matching_spine", pairs=[m1.pairs[i] for i in range(q)])
    for off in range(max(1, min(prof.cycle_offsets, max(rlen, 1)))):
        rot = cyc[off:] + cyc[:off]
        R = [rot[j * rlen:(j + 1) * rlen] for j in range(q)]
        h2 = grouped_graph(G, [c.minus for c in conns], [{r[0], r[-1]} for r in R])
        m2 = max_matching(h2)
        if m2.perfect:
            break
    if not m2.perfect:
        raise _fail("matching_teeth", f"deficiency {m2.deficiency}, Hall violator {list(m2.violator)}", trace)
    trace.record("matching_teeth", offset=off, pairs=[m2.pairs[i] for i in range(q)])

    T = make_comb(n, q)
    mapping = [0] * n
    for i in range(q):
        a = m1.pairs[i]
        c = conns[a]
        _, x = h1.witness_edge(i, a)
        j = m2.pairs[a]
        y, rj = h2.witness_edge(a, j)
        Rj = R[j] if R[j][0] == rj else list(reversed(R[j]))
        tooth = [Q[i]] + hamilton_path(c, x, y) + list(Rj)
        for tv, gv in zip(comb_tooth(n, q, i), tooth, strict=True):
            mapping[tv] = gv
    emb = Embedding(tuple(mapping), n)
    rep = validate(G, T, emb)
    if not rep.holds:
        raise AssertionError(f"comb pipeline produced an invalid embedding: {rep.to_text()}")
    trace.record("assemble", valid=1, digest=_digest([emb.mapping]))
    return PipelineResult(emb, trace, G, T)


# ---------------------------------------------------------------- trees with many teeth


def teeth_round_probabilities(n: int, eps: float, profile: Profile) -> tuple[float, ...]:
    """Rounds 1-4 at eps·log n / 8n and round 5 at (1 + eps)·log n / 2n, boosted."""
    base = eps * math.log(n) / (8 * n)
    p = min(1.0, profile.teeth_boost * base)
    p3 = min(1.0, p * profile.g3_reduction)
    p5 = min(1.0, profile.final_boost * (1 + eps) * math.log(n) / (2 * n))
    return (p, p, p3, p3, p5)


def teeth_constants(n: int, k: int, eps: float, teeth: int, profile: str | Profile = "asymptotic") -> dict:
    """All counts and thresholds of the teeth pipeline for a tree on n vertices
    with ``teeth`` teeth of ``k`` edges.

    The asymptotic values take μ1 = βα/4 and μ2 = μ1/20, the largest the
    argument allows, with α = teeth·k/n and β = 6^-j for the split level j of
    eps/14.
    """
    from .trees import split_level

    prof = get_profile(profile)
    l = k // 2
    ll = math.log(math.log(n))
    ln = math.log(n)
    split_eps = eps / prof.split_divisor
    j = split_level(split_eps)
    beta = 6.0 ** -j
    alpha = teeth * k / n
    mu1 = beta * alpha / 4
    mu2 = mu1 / 20
    out = {
        "l": l,
        "split_eps": split_eps,
        "split_level": j,
        "alpha": alpha,
        "beta": beta,
        "mu1": mu1,
        "mu2": mu2,
        "family": n // (4 * l),
        "a1": n // (20 * l),
        "s1": math.floor(mu1 * n / l),
        "s2": math.floor(mu2 * n / l),
        "m1": math.ceil(50 * n * ll / (eps * ln)),
        "m2": math.ceil(mu1 * n / (1000 * l)),
        "D1": eps * ll / 1e4,
        "D2": eps * mu1 * ll / 800,
        "expansion": prof.expansion,
        "indep_target": None,
    }
    out["d1"] = n / (100 * out["m1"])
    if prof.name != "asymptotic":
        out["s1"] = prof.s1_cap
        out["s2"] = None  # fixed once s1 is known
        out["m2"] = None  # fixed once s1 is known
        out["D1"] = prof.good_threshold
        out["D2"] = prof.path_end_threshold
        out["d1"] = prof.extraction_factor
    return out


def _desk_counts(s1: int, ratio: float, b5_factor: float) -> dict:
    s2 = max(2, math.floor(ratio * s1))
    a1 = s1 + math.ceil(s1 / 2)
    return {
        "s2": s2,
        "m2": max(1, math.ceil(s1 / 6)),
        "a1": a1,
        "family_A": a1 + 2,
        "family_B": a1 + s1 // 2 + math.ceil(b5_factor * s1),
    }


def _connector_graph(h, left_ids, right_ids) -> tuple[Graph, list]:
    """Graph on the connectors ``left_ids + right_ids`` with the edges of ``h``."""
    nodes = list(left_ids) + list(right_ids)
    li = {a: i for i, a in enumerate(left_ids)}
    ri = {b: len(left_ids) + i for i, b in enumerate(right_ids)}
    edges = [(li[a], ri[b]) for a in left_ids for b in h.adj[a] if b in ri]
    return Graph(len(nodes), edges), nodes


def _neat(h, left_ids, right_ids, m: int, d: float, seed: int) -> tuple[list, list]:
    """Keep connectors so that sets of at most m expand by d inside the kept family."""
    g, nodes = _connector_graph(h, left_ids, right_ids)
    if g.n == 0:
        return [], []
    ext = extract_expander_subgraph(g, max(1, min(m, g.n)), d, seed=seed)
    kept = {nodes[i] for i in ext.H}
    return [a for a in left_ids if a in kept], [b for b in right_ids if b in kept]


def embed_teeth_tree(
    T: Tree, k: int, eps: float, seed: int, profile: str | Profile = "desk", *, timing: bool = False
) -> PipelineResult:
    """Embed a tree with many teeth of ``k`` edges spanning a five-round random graph.

    The tree is split into S, T1, T2; s1 teeth of S lose their last 2l
    vertices (l = ⌊k/2⌋) and the rest of S goes into well-connected vertices
    outside all connectors.  Each shortened tooth gets a connector; some get a
    second connector through independent grouped edges at once, the rest (𝒞)
    wait.  T1, T2 and s2 paths of l vertices cover what is left, and a final
    matching of 𝒞 into the spare connectors 𝒟 and the paths finishes every
    tooth.
    """
    prof = get_profile(profile)
    n = T.n
    trace = PipelineTrace("teeth_tree", {"n": n, "k": k, "eps": eps, "seed": seed, "profile": prof.name,
                                         "teeth_boost": prof.teeth_boost, "final_boost": prof.final_boost,
                                         "tree": _tree_digest(T)},
                          timing=timing)
    teeth_all = find_teeth(T, k)
    if not teeth_all:
        raise ValueError(f"tree has no teeth with {k} edges")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    l = k // 2
    if l < 5:
        raise ValueError("teeth must have at least 10 edges")
    C = teeth_constants(n, k, eps, len(teeth_all), prof)
    trace.record("teeth", count=len(teeth_all), l=l, alpha=round(C["alpha"], 6))

    rounds = teeth_round_probabilities(n, eps, prof)
    sched = ExposureSchedule(rounds, seed)
    ex = expose(sched, n)
    G1, G2, G3, G4, G5 = ex.rounds
    G = ex.union
    trace.record("expose", rounds=5, p_rounds=list(rounds), p_effective=sched.composite_probability(),
                 edges=[r.m for r in ex.rounds])

    # split and choose the teeth to shorten
    try:
        split, _ = split_spines(T, k, C["split_eps"])
    except ValueError as exc:
        raise _fail("split", str(exc), trace) from exc
    inside = teeth_inside(T, split, k)
    s1 = C["s1"] if C["s1"] is not None else len(inside)
    if prof.name != "asymptotic":
        s1 = min(s1, len(inside))
        C.update(_desk_counts(s1, prof.s2_ratio, prof.b5_factor))
        s2, a1, NA, NB = C["s2"], C["a1"], C["family_A"], C["family_B"]
    else:
        s2, a1, NA, NB = C["s2"], C["a1"], C["family"], C["family"]
    trace.record("split", S=len(split.S), T1=len(split.T1), T2=len(split.T2), teeth_in_S=len(inside),
                 s1=s1, s2=s2)
    if s1 < 1 or s2 < 2 or s1 > len(inside) or s2 > s1 // 2:
        raise _fail("split", f"s1={s1}, s2={s2} with {len(inside)} teeth inside S", trace)
    chosen = inside[:s1]
    removed = [p.vertices[: 2 * l] for p in chosen]
    attach_t = [p.vertices[2 * l] for p in chosen]
    flat = [v for r in removed for v in r]
    assert len(set(flat)) == len(flat)
    S_prime = sorted(set(split.S) - set(flat))

    # round 1: connector families
    kk = prof.k_for(n)
    free = set(range(n))
    A, B = [], []
    for fam, count, tag in ((A, NA, 1), (B, NB, 2)):
        for i in range(count):
            try:
                c = build_connector(G1, l, free, seed=derive_seed(seed, 100 * tag, i), k=kk, m=prof.connector_m)
            except (ConnectorError, PathSearchError, ValueError) as exc:
                raise _fail("connectors", f"family {tag} connector {i}: {exc}", trace) from exc
            fam.append(c)
            free -= set(c.vertices)
    trace.record("connectors", A=len(A), B=len(B), l=l, k=kk, digest=_digest(c.vertices for c in A + B))

    # round 2: independent grouped edges between A- and B+
    H = grouped_graph(G2, [c.minus for c in A], [c.plus for c in B])
    target = a1 if prof.indep_to_a1 else len(A) // 2
    partner: dict[int, int] = {}
    takenB: set[int] = set()
    for i in range(len(A)):
        if len(partner) >= target:
            break
        for j in H.adj[i]:
            if j not in takenB:
                partner[i] = j
                takenB.add(j)
                break
    if len(partner) < a1:
        raise _fail("independent_edges", f"{len(partner)} independent edges, need {a1}", trace)
    A1 = sorted(partner)[:a1]
    B1 = sorted(partner[i] for i in A1) if prof.indep_to_a1 else sorted(takenB)
    B2 = [j for j in range(len(B)) if j not in set(B1)]
    trace.record("independent_edges", found=len(partner), A1=A1, B1=B1)

    # round 3: good vertices and the expanding core
    V = sorted(free)
    K = grouped_graph(G3, V, [A[i].plus for i in A1])
    V1 = [V[i] for i in range(len(V)) if len(K.adj[i]) >= C["D1"]]
    G13 = G1.union(G2).union(G3)
    sub, labels = G13.induced(V1)
    m1 = C["m1"] if prof.name == "asymptotic" else max(1, min(len(V1) // 10, 25))
    try:
        ext = extract_expander_subgraph(sub, m1, C["d1"], seed=derive_seed(seed, 400))
    except ExtractionError as exc:
        raise _fail("good_vertices", str(exc), trace) from exc
    V2 = sorted(labels[i] for i in ext.H)
    trace.record("good_vertices", V=len(V), V1=len(V1), V2=len(V2), m1=m1)
    if len(V2) < len(S_prime):
        raise _fail("good_vertices", f"|V2|={len(V2)} < |S'|={len(S_prime)}", trace)

    # embed S' into the core
    Sg, Slab = T.induced(S_prime)
    Stree = Tree.from_graph(Sg)
    Sidx = {v: i for i, v in enumerate(Slab)}
    core, clab = G13.induced(V2)
    root = Sidx[split.t1]
    anchor = max(range(core.n), key=lambda v: (core.degree(v), -v))
    try:
        e0 = embed_tree_in_expander(core, Stree, anchor, root, seed=derive_seed(seed, 500))
    except EmbeddingError as exc:
        raise _fail("embed_core", str(exc), trace) from exc
    phi = {Slab[i]: clab[e0[i]] for i in range(Stree.n)}
    X = [phi[x] for x in attach_t]
    trace.record("embed_core", size=len(phi), digest=_digest([sorted(phi.items())]))

    # attach connectors of A1 to X (round 3 edges)
    Kx = grouped_graph(G3, X, [A[i].plus for i in A1])
    mx = max_matching(Kx)
    if not mx.perfect:
        raise _fail("attach", f"deficiency {mx.deficiency}, Hall violator {list(mx.violator)}", trace)
    att = {}  # tooth index -> (connector index in A, entry vertex in P+)
    for t_i in range(s1):
        j = mx.pairs[t_i]
        _, entry = Kx.witness_edge(t_i, j)
        att[t_i] = (A1[j], entry)
    A2 = sorted(a for a, _ in att.values())
    trace.record("attach", pairs=[att[i][0] for i in range(s1)])

    # Hall-friendly sub-families
    if len(B2) < len(A2) // 2 + math.ceil(prof.b5_factor * len(A2)):
        raise _fail("hall_sets", f"|B2|={len(B2)} too small for |A2|={len(A2)}", trace)
    B3 = B2[: len(A2) // 2]
    try:
        A3, B4 = _neat(H, A2, B3, 2 * C["m2"], C["expansion"], derive_seed(seed, 600))
    except ExtractionError as exc:
        raise _fail("hall_sets", f"A2 ∪ B3: {exc}", trace) from exc
    B5 = [j for j in B2 if j not in set(B4)][: math.ceil(prof.b5_factor * len(A2))]
    try:
        A4, B6 = _neat(H, A3, B5, 2 * C["m2"], C["expansion"], derive_seed(seed, 601))
    except ExtractionError as exc:
        raise _fail("hall_sets", f"A3 ∪ B5: {exc}", trace) from exc
    need7 = len(A3) - len(B4) - s2
    if need7 < 0 or need7 > len(B6):
        raise _fail("hall_sets", f"|A3|={len(A3)}, |B4|={len(B4)}, s2={s2}, |B6|={len(B6)}", trace)
    B7 = B6[:need7]
    Cset = A3
    Dset = B4 + B7
    trace.record("hall_sets", A3=len(A3), B4=len(B4), A4=len(A4), B6=len(B6), B7=len(B7))

    # complete the teeth whose connector is not in C
    tooth_paths: dict[int, list[int]] = {}
    for t_i in range(s1):
        a, entry = att[t_i]
        if a in set(Cset):
            continue
        b = partner[a]
        r, y = H.witness_edge(a, b)
        first = hamilton_path(A[a], entry, r)
        second = hamilton_path(B[b], y, B[b].minus[0])
        tooth_paths[t_i] = [X[t_i]] + first + second

    # rounds 4 and 5: the rest of the graph
    busy = set(phi.values())
    for pth in tooth_paths.values():
        busy |= set(pth)
    for a in Cset:
        busy |= set(A[a].vertices)
    for b in Dset:
        busy |= set(B[b].vertices)
    W = sorted(set(range(n)) - busy)
    Lg = grouped_graph(G4, W, [A[a].minus for a in Cset])
    Z = {W[i] for i in range(len(W)) if len(Lg.adj[i]) >= C["D2"]}
    v1, v2 = phi[split.t1], phi[split.t2]
    region = W + [v1, v2]
    sub5, lab5 = G5.induced(region)
    idx5 = {v: i for i, v in enumerate(lab5)}
    T1g, T1lab = T.induced(split.T1)
    T2g, T2lab = T.induced(split.T2)
    T1t, T2t = Tree.from_graph(T1g), Tree.from_graph(T2g)
    trace.record("avoid_setup", W=len(W), Z=len(Z), T1=T1t.n, T2=T2t.n)
    try:
        av = embed_avoid(
            sub5, T1t, T2t, {idx5[z] for z in Z}, idx5[v1], idx5[v2], s2, l,
            seed=derive_seed(seed, 700), t1=T1lab.index(split.t1), t2=T2lab.index(split.t2),
            partition_policy=prof.partition_policy,
        )
    except (PipelineError, ValueError) as exc:
        raise _fail("avoid", str(exc), trace) from exc
    for i, tv in enumerate(T1lab):
        phi.setdefault(tv, lab5[av.emb1[i]])
    for i, tv in enumerate(T2lab):
        phi.setdefault(tv, lab5[av.emb2[i]])
    Qpaths = [[lab5[x] for x in pth] for pth in av.paths]
    trace.record("avoid", paths=len(Qpaths), digest=_digest(Qpaths))

    # final matching of C- into D+ and the path ends (rounds 2 and 4)
    G24 = G2.union(G4)
    fm = grouped_graph(G24, [A[a].minus for a in Cset], [B[b].plus for b in Dset] + [{q[0], q[-1]} for q in Qpaths])
    mf = max_matching(fm)
    if not mf.perfect:
        raise _fail("final_matching", f"deficiency {mf.deficiency}, Hall violator {list(mf.violator)}", trace)
    trace.record("final_matching", pairs=[mf.pairs[i] for i in range(len(Cset))])
    cpos = {a: i for i, a in enumerate(Cset)}
    for t_i in range(s1):
        a, entry = att[t_i]
        if a not in cpos:
            continue
        i = cpos[a]
        j = mf.pairs[i]
        r, y = fm.witness_edge(i, j)
        first = hamilton_path(A[a], entry, r)
        if j < len(Dset):
            b = Dset[j]
            second = hamilton_path(B[b], y, B[b].minus[0])
        else:
            qp = Qpaths[j - len(Dset)]
            second = qp if qp[0] == y else list(reversed(qp))
        tooth_paths[t_i] = [X[t_i]] + first + second

    # assemble: tooth t_i runs from its attachment vertex back to the leaf
    for t_i in range(s1):
        tv = [attach_t[t_i]] + list(reversed(removed[t_i]))
        for a_, b_ in zip(tv, tooth_paths[t_i], strict=True):
            if a_ in phi:
                assert phi[a_] == b_
            phi[a_] = b_
    if len(phi) != n:
        raise AssertionError(f"assembled map covers {len(phi)} of {n} tree vertices")
    emb = Embedding(tuple(phi[v] for v in range(n)), n)
    rep = validate(G, T, emb)
    if not rep.holds:
        raise AssertionError(f"teeth pipeline produced an invalid embedding: {rep.to_text()}")
    trace.record("assemble", valid=1, digest=_digest([emb.mapping]))
    return PipelineResult(emb, trace, G, T)


def _tree_digest(T: Tree) -> str:
    return "t" + _digest([sorted(T.edges())])


def replay(trace: PipelineTrace, tree: Tree | None = None) -> PipelineResult:
    """Re-run the pipeline recorded in ``trace`` with the same inputs and seed.

    A ``teeth_tree`` trace needs its tree; when none is given the comb
    ``make_comb(n, k + 1)`` is tried and must match the recorded digest.
    """
    prm = trace.params
    prof = get_profile(str(prm["profile"]))
    if trace.pipeline == "comb_sqrt":
        return embed_comb_sqrt(int(prm["n"]), int(prm["seed"]), prof)
    if trace.pipeline == "teeth_tree":
        n, k = int(prm["n"]), int(prm["k"])
        if tree is None:
            tree = make_comb(n, k + 1)
        if _tree_digest(tree) != str(prm["tree"]):
            raise ValueError("tree does not match the one recorded in the trace")
        return embed_teeth_tree(tree, k, float(prm["eps"]), int(prm["seed"]), prof)
    raise ValueError(f"unknown pipeline {trace.pipeline!r}")
