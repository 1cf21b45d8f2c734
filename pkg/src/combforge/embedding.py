"""Tree embeddings: validation, a greedy expander embedder and the
two-trees-plus-paths decomposition used by the teeth pipeline."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .connectors import PathSearchError, posa_hamilton_cycle, validate_path
from .extraction import PartitionError, PipelineError, partition_degree_proportional
from .graphs import Graph, PropertyReport, derive_seed, make_rng
from .matching import hopcroft_karp
from .trees import bfs_order


class EmbeddingError(RuntimeError):
    def __init__(self, message: str, partial: dict | None = None, frontier: Sequence[int] = ()):
        super().__init__(message)
        self.partial = partial or {}
        self.frontier = tuple(frontier)


@dataclass
class Embedding:
    """Injective map ``mapping[t] = v`` from tree vertices to graph vertices."""

    mapping: tuple[int, ...]
    graph_n: int

    def __getitem__(self, t: int) -> int:
        return self.mapping[t]

    def __len__(self) -> int:
        return len(self.mapping)

    def image(self) -> set[int]:
        return set(self.mapping)

    def to_text(self) -> str:
        lines = [f"embedding {len(self.mapping)}"]
        lines.extend(f"{t} {v}" for t, v in enumerate(self.mapping))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, graph_n: int) -> "Embedding":
        lines = [ln for ln in text.split("\n") if ln]
        head = lines[0].split()
        if len(head) != 2 or head[0] != "embedding":
            raise ValueError("bad embedding header")
        k = int(head[1])
        if len(lines) - 1 != k:
            raise ValueError("embedding line count does not match header")
        mapping = [0] * k
        seen = set()
        for ln in lines[1:]:
            t, v = (int(x) for x in ln.split())
            if t in seen or not 0 <= t < k:
                raise ValueError(f"bad tree vertex {t}")
            seen.add(t)
            mapping[t] = v
        return cls(tuple(mapping), graph_n)


def validate(g: Graph, T: Graph, e: Embedding | dict | Sequence[int]) -> PropertyReport:
    """Injective and edge-preserving; the witness is the first collision or bad edge."""
    if isinstance(e, Embedding):
        mp = list(e.mapping)
    elif isinstance(e, dict):
        mp = [e.get(t) for t in range(T.n)]
    else:
        mp = list(e)
    if len(mp) != T.n or any(v is None for v in mp):
        missing = next((t for t in range(T.n) if t >= len(mp) or mp[t] is None), len(mp))
        return PropertyReport("embedding", False, witness=((missing,),), condition="unmapped")
    owner: dict[int, int] = {}
    for t, v in enumerate(mp):
        if not 0 <= v < g.n:
            return PropertyReport("embedding", False, witness=((t,),), condition="out_of_range")
        if v in owner:
            return PropertyReport("embedding", False, witness=((owner[v], t),), condition="collision", quantity=v)
        owner[v] = t
    for a, b in T.edges():
        if not g.has_edge(mp[a], mp[b]):
            return PropertyReport("embedding", False, witness=((a, b),), condition="edge")
    return PropertyReport("embedding", True)


# ---------------------------------------------------------------- greedy embedder


def _children(T: Graph, order: list[int]) -> tuple[dict[int, int | None], dict[int, list[int]]]:
    parent: dict[int, int | None] = {order[0]: None}
    kids: dict[int, list[int]] = {u: [] for u in order}
    seen = {order[0]}
    for u in order:
        for w in T.neighbors(u):
            if w not in seen:
                seen.add(w)
                parent[w] = u
                kids[u].append(w)
    return parent, kids


def embed_tree_in_expander(
    g: Graph,
    T: Graph,
    v: int,
    t: int,
    seed: int = 0,
    *,
    allowed: Iterable[int] | None = None,
    restarts: int = 12,
) -> Embedding:
    """Embed ``T`` into ``g[allowed]`` with ``t`` on ``v``.

    Inner vertices are placed in BFS order next to their parent's image.  A
    vertex with one child takes the candidate with the fewest free
    neighbours, a branching vertex the one with the most.  A candidate is rejected if
    taking it would leave an already placed vertex with fewer free neighbours
    than it still has unplaced children.  When an inner vertex cannot be
    placed, one placed vertex without placed children next to the parent's
    image is moved elsewhere to make room.  Leaves are placed last, all at
    once, by a maximum bipartite matching between leaves and free vertices
    adjacent to their parent's image.  Failed attempts restart with fresh
    randomness.
    """
    A = set(range(g.n)) if allowed is None else set(allowed)
    if v not in A:
        raise ValueError("anchor vertex is not allowed")
    if T.n > len(A):
        raise EmbeddingError("tree larger than the allowed vertex set")
    order = bfs_order(T, t)
    if len(order) != T.n:
        raise ValueError("tree is not connected")
    parent, kids = _children(T, order)
    nkids = {u: len(kids[u]) for u in order}
    leaves = [u for u in order[1:] if not kids[u]]
    core = [u for u in order if kids[u] or u == t]
    inA = np.zeros(g.n, dtype=bool)
    inA[list(A)] = True
    base_free = g.degrees_into(inA.astype(float))
    last_partial: dict = {}
    frontier: list[int] = []
    for attempt in range(restarts):
        rng = make_rng(derive_seed(seed, attempt))
        free = base_free.copy()
        used = np.zeros(g.n, dtype=bool)
        phi: dict[int, int] = {}
        inv: dict[int, int] = {}
        pending = dict(nkids)

        def occupy(u, w):
            phi[u] = w
            inv[w] = u
            used[w] = True
            for z in g.neighbors(w):
                free[z] -= 1

        def release(u):
            w = phi.pop(u)
            del inv[w]
            used[w] = False
            for z in g.neighbors(w):
                free[z] += 1

        def feasible(u, w, P):
            if used[w] or not inA[w] or free[w] < nkids[u]:
                return False
            for z in g.neighbors(w):
                if used[z] and z != P:
                    x = inv[z]
                    if pending[x] > 0 and free[z] - 1 < pending[x]:
                        return False
            return True

        def choose(u, P, exclude=()):
            cands = [w for w in g.neighbors(P) if not used[w] and inA[w] and w not in exclude]
            ok = [w for w in cands if feasible(u, w, P)]
            if not ok:
                return None
            noise = rng.random(len(ok))
            if nkids[u] <= 1:
                scores = [free[w] + noise[i] for i, w in enumerate(ok)]
                return ok[int(np.argmin(scores))]
            scores = [free[w] + noise[i] for i, w in enumerate(ok)]
            return ok[int(np.argmax(scores))]

        occupy(t, v)
        failed = False
        for u in core[1:]:
            p = parent[u]
            P = phi[p]
            w = choose(u, P)
            if w is None:
                w = _make_room(g, u, P, phi, inv, parent, pending, nkids, used, t, choose, occupy, release, rng)
            if w is None:
                failed = True
                last_partial = dict(phi)
                frontier = [u]
                break
            occupy(u, w)
            pending[p] -= 1
        if not failed and leaves:
            free_list = np.flatnonzero(inA & ~used)
            fidx = {int(w): i for i, w in enumerate(free_list)}
            adj = [[fidx[w] for w in g.neighbors(phi[parent[u]]) if w in fidx] for u in leaves]
            res = hopcroft_karp(adj, len(free_list))
            if res.perfect:
                for i, u in enumerate(leaves):
                    phi[u] = int(free_list[res.pairs[i]])
            else:
                failed = True
                last_partial = dict(phi)
                frontier = [leaves[i] for i in res.violator]
        if not failed:
            emb = Embedding(tuple(phi[x] for x in range(T.n)), g.n)
            rep = validate(g, T, emb)
            if not rep.holds or emb[t] != v or not set(emb.mapping) <= A:
                raise AssertionError(f"embedder produced an invalid map: {rep.to_text()}")
            return emb
    raise EmbeddingError(f"could not embed tree of {T.n} vertices after {restarts} restarts",
                         last_partial, frontier)


def _make_room(g, u, P, phi, inv, parent, pending, nkids, used, root, choose, occupy, release, rng):
    """Move one placed childless neighbour of P elsewhere and return its old image."""
    cands = [z for z in g.neighbors(P) if used[z]]
    rng.shuffle(cands)
    for Y in cands[:20]:
        y = inv[Y]
        if y == root or pending[y] != nkids[y]:
            continue
        py = parent[y]
        PY = phi[py]
        release(y)
        W = choose(y, PY, exclude=(Y,))
        if W is None:
            occupy(y, Y)
            continue
        occupy(y, W)
        fits = choose(u, P)
        if fits is not None:
            return fits
        release(y)
        occupy(y, Y)
    return None


# ---------------------------------------------------------------- traces


@dataclass
class PipelineTrace:
    """Per-stage log of a pipeline run; replaying the seeds rebuilds the same objects."""

    pipeline: str
    params: dict = field(default_factory=dict)
    stages: list[dict] = field(default_factory=list)
    timing: bool = False

    def record(self, stage: str, **info) -> None:
        rec = {"stage": stage}
        rec.update(info)
        if self.timing:
            rec["wall_ms"] = round(time.perf_counter() * 1000, 1)
        self.stages.append(rec)

    def to_text(self) -> str:
        def fmt(v):
            if isinstance(v, (list, tuple)):
                return ",".join(fmt(x) for x in v)
            if isinstance(v, float):
                return repr(round(v, 10))
            return str(v)

        lines = [f"trace {self.pipeline} " + " ".join(f"{k}={fmt(v)}" for k, v in sorted(self.params.items()))]
        for rec in self.stages:
            lines.append(" ".join(f"{k}={fmt(v)}" for k, v in rec.items()))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PipelineTrace":
        lines = [ln for ln in text.split("\n") if ln]
        head = lines[0].split()
        params = dict(tok.split("=", 1) for tok in head[2:])
        tr = cls(head[1], params)
        for ln in lines[1:]:
            tr.stages.append(dict(tok.split("=", 1) for tok in ln.split()))
        return tr


# ---------------------------------------------------------------- embed_avoid


def avoid_part_sizes(n: int, s: int, l: int) -> dict[str, int]:
    """Target sizes of Z1, Z3, Z4, Z5 and of the residue W3.

    |Z5| is ⌈s/2⌉l - ⌊s/2⌋⌊l/2⌋ so that the unused part of Z4 plus Z5 holds
    exactly ⌈s/2⌉ paths of l vertices; for even s this equals ⌈s/2⌉⌈l/2⌉.
    """
    h, H = s // 2, (s + 1) // 2
    return {
        "Z1": (2 * n) // 3,
        "Z3": (s * l) // 8,
        "Z4": h * (l // 2) + 2 * h,
        "Z5": H * l - h * (l // 2),
        "W3": h * (l - 2),
    }


@dataclass
class AvoidResult:
    emb1: Embedding
    emb2: Embedding
    paths: list[list[int]]
    parts: dict[str, tuple[int, ...]]
    trace: PipelineTrace


def embed_avoid(
    g: Graph,
    T1: Graph,
    T2: Graph,
    Z: Iterable[int],
    v1: int,
    v2: int,
    s: int,
    l: int,
    seed: int = 0,
    *,
    t1: int = 0,
    t2: int = 0,
    delta: float | None = None,
    cycle_offsets: int = 8,
    partition_attempts: int = 200,
    partition_policy: str = "strict",
) -> AvoidResult:
    """Embed T1 (t1 on v1) and T2 (t2 on v2) disjointly inside Z ∪ {v1, v2} and
    cover every other vertex by ``s`` paths of ``l`` vertices ending in Z.

    Z is cut into Z1..Z5 by four degree-proportional splits.  T1 (the smaller
    tree) goes into Z1 + v1 and T2 into the rest of Z1, Z2 and v2.  The
    residue W3 gets a Hamilton cycle cut into ⌊s/2⌋ paths of l - 2 vertices,
    whose ends are matched into Z4; the unused part of Z4 together with Z5
    gets a Hamilton cycle cut into ⌈s/2⌉ paths of l vertices.

    With ``partition_policy="strict"`` a split violating the degree
    conditions aborts; ``"best"`` keeps the split with the fewest violating
    vertices and records their number in the trace.  When both trees are
    single vertices the rest of the graph is simply cut into paths.
    """
    n = g.n
    Z = set(Z)
    trace = PipelineTrace("embed_avoid", {"n": n, "s": s, "l": l, "seed": seed})
    if T1.n + T2.n != n - s * l:
        raise ValueError(f"|T1| + |T2| = {T1.n + T2.n} but n - s·l = {n - s * l}")
    if v1 == v2 or v1 in Z or v2 in Z:
        raise ValueError("v1, v2 must be distinct vertices outside Z")
    if l < 5 or s < 1:
        raise ValueError("need l >= 5 and s >= 1")
    if partition_policy not in ("strict", "best"):
        raise ValueError("partition_policy must be 'strict' or 'best'")
    swapped = T1.n > T2.n
    if swapped:
        T1, T2, v1, v2, t1, t2 = T2, T1, v2, v1, t2, t1
    if T1.n == 1 and T2.n == 1:
        return _path_cover(g, Z, v1, v2, s, l, seed, trace, cycle_offsets, swapped)
    sizes = avoid_part_sizes(n, s, l)
    z2 = len(Z) - sizes["Z1"] - sizes["Z3"] - sizes["Z4"] - sizes["Z5"]
    trace.params.update(sizes)
    trace.params["Z2"] = z2
    trace.record("diagnostics", Z=len(Z), B=n - len(Z), ls_over_n=round(s * l / n, 6), max_degree=g.max_degree(),
                 min_deg_into_Z=min(sum(1 for u in g.neighbors(x) if u in Z) for x in range(n)))
    if z2 < 0:
        raise PipelineError("partition", f"Z too small for the parts (Z2 would have {z2} vertices)", trace)
    if sizes["W3"] < sizes["Z3"] + (n - len(Z)) - 2:
        raise PipelineError("partition", f"residue of {sizes['W3']} vertices cannot hold Z3 and the "
                            f"{n - len(Z) - 2} vertices outside Z", trace)
    if delta is None:
        delta = 1
    # four binary splits: Z -> Z1 | R1 -> Z2 | R2 -> Z3 | R3 -> Z4 | Z5
    order = [("Z1", sizes["Z1"]), ("Z2", z2), ("Z3", sizes["Z3"]), ("Z4", sizes["Z4"])]
    parts: dict[str, tuple[int, ...]] = {}
    rest = sorted(Z)
    for i, (name, size) in enumerate(order):
        part, info = _split(g, rest, size, delta, derive_seed(seed, 10 + i), partition_attempts, partition_policy)
        if part is None:
            raise PipelineError("partition", f"no degree-proportional split for {name}: {info}", trace)
        parts[name], rest = part
        trace.record("partition", part=name, size=size, **info)
    parts["Z5"] = tuple(rest)
    for key in ("Z1", "Z3", "Z4", "Z5"):
        assert len(parts[key]) == sizes[key]

    W1 = set(parts["Z1"]) | {v1}
    try:
        e1 = embed_tree_in_expander(g, T1, v1, t1, seed=derive_seed(seed, 1), allowed=W1)
    except EmbeddingError as exc:
        raise PipelineError("embed_T1", str(exc), trace) from exc
    S1 = e1.image()
    W2 = (W1 - S1) | set(parts["Z2"]) | {v2}
    try:
        e2 = embed_tree_in_expander(g, T2, v2, t2, seed=derive_seed(seed, 2), allowed=W2)
    except EmbeddingError as exc:
        raise PipelineError("embed_T2", str(exc), trace) from exc
    S2 = e2.image()
    trace.record("trees", T1=T1.n, T2=T2.n, W1=len(W1), W2=len(W2))

    Z4, Z5 = set(parts["Z4"]), set(parts["Z5"])
    W3 = set(range(n)) - Z4 - Z5 - S1 - S2
    h, H = s // 2, (s + 1) // 2
    assert len(W3) == sizes["W3"], (len(W3), sizes["W3"])
    paths: list[list[int]] = []
    used_Z4: set[int] = set()
    if h:
        try:
            cyc = posa_hamilton_cycle(g, derive_seed(seed, 3), vertices=W3)
        except PathSearchError as exc:
            raise PipelineError("cycle_W3", str(exc), trace) from exc
        z4 = sorted(Z4)
        zi = {z: i for i, z in enumerate(z4)}
        found = None
        for off in range(min(cycle_offsets, l - 2)):
            rot = cyc[off:] + cyc[:off]
            segs = [rot[i * (l - 2):(i + 1) * (l - 2)] for i in range(h)]
            ends = [x for sgm in segs for x in (sgm[0], sgm[-1])]
            adj = [[zi[z] for z in g.neighbors(x) if z in zi] for x in ends]
            res = hopcroft_karp(adj, len(z4))
            if res.perfect:
                found = (segs, ends, res)
                break
        if found is None:
            raise PipelineError("match_Z4", "path ends have no matching into Z4", trace)
        segs, ends, res = found
        for i, sgm in enumerate(segs):
            a = z4[res.pairs[2 * i]]
            b = z4[res.pairs[2 * i + 1]]
            used_Z4.update((a, b))
            paths.append([a] + list(sgm) + [b])
    W4 = (Z4 - used_Z4) | Z5
    assert len(W4) == H * l
    try:
        cyc = posa_hamilton_cycle(g, derive_seed(seed, 4), vertices=W4) if len(W4) >= 3 else sorted(W4)
    except PathSearchError as exc:
        raise PipelineError("cycle_W4", str(exc), trace) from exc
    for i in range(H):
        paths.append(list(cyc[i * l:(i + 1) * l]))
    trace.record("paths", count=len(paths), W3=len(W3), W4=len(W4))
    if swapped:
        e1, e2 = e2, e1
    out = AvoidResult(e1, e2, paths, parts, trace)
    check_avoid(g, T2 if swapped else T1, T1 if swapped else T2, Z, out, s, l)
    return out


def _split(g, Y, size, delta, seed, attempts, policy):
    """One binary split of Y; returns ((A, B), info) or (None, reason)."""
    if size == 0:
        return ((), tuple(Y)), {"attempts": 0, "violators": 0}
    if size == len(Y):
        return (tuple(Y), ()), {"attempts": 0, "violators": 0}
    try:
        part = partition_degree_proportional(g, Y, size, len(Y) - size, delta, seed=seed, max_attempts=attempts)
        return (part.A, part.B), {"attempts": part.attempts, "violators": 0}
    except PartitionError as exc:
        if policy == "strict":
            return None, str(exc)
        best = exc.best
        if not best.A and not best.B:
            rng = make_rng(seed)
            perm = rng.permutation(len(Y))
            Ys = np.asarray(Y)
            A = tuple(sorted(Ys[perm[:size]].tolist()))
            B = tuple(sorted(Ys[perm[size:]].tolist()))
            return (A, B), {"attempts": 0, "violators": len(best.violators)}
        return (best.A, best.B), {"attempts": attempts, "violators": len(best.violators)}


def _path_cover(g, Z, v1, v2, s, l, seed, trace, offsets, swapped):
    rest = sorted(set(range(g.n)) - {v1, v2})
    trace.record("diagnostics", degenerate=1, residue=len(rest))
    try:
        cyc = posa_hamilton_cycle(g, derive_seed(seed, 3), vertices=rest)
    except PathSearchError as exc:
        raise PipelineError("cycle_W4", str(exc), trace) from exc
    paths = None
    for off in range(min(offsets, l)):
        rot = cyc[off:] + cyc[:off]
        cand = [rot[i * l:(i + 1) * l] for i in range(s)]
        if all(p[0] in Z and p[-1] in Z for p in cand):
            paths = cand
            break
    if paths is None:
        raise PipelineError("match_Z4", "no rotation of the cycle puts all path ends in Z", trace)
    e1 = Embedding((v1,), g.n)
    e2 = Embedding((v2,), g.n)
    if swapped:
        e1, e2 = e2, e1
    trace.record("paths", count=len(paths), W3=0, W4=len(rest))
    return AvoidResult(e1, e2, paths, {}, trace)


def check_avoid(g: Graph, T1: Graph, T2: Graph, Z: set[int], res: AvoidResult, s: int, l: int) -> None:
    """Raise AssertionError unless the decomposition meets every postcondition."""
    for T, e in ((T1, res.emb1), (T2, res.emb2)):
        rep = validate(g, T, e)
        assert rep.holds, rep.to_text()
    assert not res.emb1.image() & res.emb2.image()
    assert len(res.paths) == s
    covered = res.emb1.image() | res.emb2.image()
    for p in res.paths:
        assert len(p) == l
        validate_path(g, p)
        assert p[0] in Z and p[-1] in Z
        assert not covered & set(p)
        covered |= set(p)
    assert covered == set(range(g.n))
