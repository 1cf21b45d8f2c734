"""Fixed-length path search, good paths, (l, γ)-connectors and a Pósa heuristic.

A *good path* starts at ``p0`` and carries a set R of its edges together with
certificates: for each e in R a Hamilton path of the path's vertex set that
starts at ``p0``, uses every edge of R and ends with e.  A connector glues two
good paths at a common start ``x``; the end vertices of the certificates give
the end-sets H⁺ and H⁻, and any x⁺ ∈ H⁺, y⁻ ∈ H⁻ are joined by the reversed
side-1 certificate followed by the side-2 certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph, make_rng

Edge = tuple[int, int]


def _key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


class PathSearchError(RuntimeError):
    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class ConnectorError(RuntimeError):
    def __init__(self, message: str, state: dict | None = None):
        super().__init__(message)
        self.state = state or {}


def validate_path(g: Graph, path: Sequence[int], vertices: Iterable[int] | None = None) -> None:
    """Raise ValueError unless ``path`` is a simple path of ``g`` (spanning ``vertices`` if given)."""
    if len(set(path)) != len(path):
        raise ValueError("path repeats a vertex")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise ValueError(f"path uses non-edge ({a},{b})")
    if vertices is not None and set(path) != set(vertices):
        raise ValueError("path does not cover exactly the required vertex set")


# ---------------------------------------------------------------- path search


def _distances_to(g: Graph, target: int, U: set[int], depth: int) -> dict[int, int]:
    """BFS distance to ``target`` moving only through vertices of ``U``."""
    dist = {target: 0}
    frontier = [target]
    d = 0
    while frontier and d < depth:
        d += 1
        nxt = []
        for x in frontier:
            for y in g.neighbors(x):
                if y in U and y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return dist


def _one_attempt(g, x, y, U, length, dist, rng, max_expansions):
    """Randomized DFS for an x,y-path with ``length`` edges and interior in U."""
    path = [x]
    used = {x}
    stack = []

    def candidates(v, remaining):
        if remaining == 1:
            return [y] if g.has_edge(v, y) else []
        cand = [w for w in g.neighbors(v) if w in U and w not in used and dist.get(w, 1 << 30) <= remaining - 1]
        rng.shuffle(cand)
        return cand

    stack.append(candidates(x, length))
    expansions = 0
    while stack:
        if expansions > max_expansions:
            return None
        cands = stack[-1]
        if not cands:
            stack.pop()
            v = path.pop()
            used.discard(v)
            continue
        w = cands.pop()
        expansions += 1
        path.append(w)
        if w == y:
            if len(path) - 1 == length:
                return path
            path.pop()
            continue
        used.add(w)
        stack.append(candidates(w, length - (len(path) - 1)))
    return None


def find_path_of_length(
    g: Graph,
    pairs: Sequence[tuple[int, int]],
    U: Iterable[int],
    lengths: Sequence[int],
    *,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    budget_factor: int = 50,
    max_expansions: int | None = None,
) -> tuple[int, list[int]]:
    """Find, for some i, an x_i,y_i-path with exactly ``lengths[i]`` edges
    whose interior lies in ``U``.

    Attempts are randomized depth-first searches pruned by the distance to
    y_i inside U; pairs are tried round-robin in the given order, with up to
    ``budget_factor · lengths[i]`` attempts each.
    """
    if len(pairs) != len(lengths):
        raise ValueError("pairs and lengths differ in size")
    U = set(U)
    ends = [v for p in pairs for v in p]
    if any(x == y for x, y in pairs):
        raise ValueError("a pair repeats its vertex")
    if U & set(ends):
        raise ValueError("pairs must be disjoint from U")
    if any(k < 1 for k in lengths):
        raise ValueError("lengths must be positive")
    if rng is None:
        rng = make_rng(seed)
    budgets = [budget_factor * k for k in lengths]
    dists: dict[int, dict[int, int]] = {}
    attempts = 0
    live = [i for i, (x, y) in enumerate(pairs) if lengths[i] - 1 <= len(U)]
    while live:
        still = []
        for i in live:
            x, y = pairs[i]
            k = lengths[i]
            if k == 1:
                if g.has_edge(x, y):
                    return i, [x, y]
                continue
            if i not in dists:
                dists[i] = _distances_to(g, y, U, k)
                dx = min((dists[i].get(w, 1 << 30) for w in g.neighbors(x) if w in U), default=1 << 30)
                if dx > k - 1:
                    continue
            cap = max_expansions or 40 * k + 200
            path = _one_attempt(g, x, y, U, k, dists[i], rng, cap)
            attempts += 1
            if path is not None:
                return i, path
            budgets[i] -= 1
            if budgets[i] > 0:
                still.append(i)
        live = still
    raise PathSearchError(f"no path found after {attempts} attempts", attempts)


def find_path(
    g: Graph, U: Iterable[int], num_vertices: int, *, seed: int = 0, rng=None, attempts: int = 50,
    start: int | None = None,
) -> list[int]:
    """Any path on ``num_vertices`` vertices of ``U`` (randomized DFS with restarts)."""
    U = sorted(set(U))
    if num_vertices < 1 or num_vertices > len(U):
        raise PathSearchError("requested path longer than the vertex pool")
    if rng is None:
        rng = make_rng(seed)
    Uset = set(U)
    for _ in range(attempts):
        s = start if start is not None else U[int(rng.integers(len(U)))]
        path = [s]
        used = {s}
        stack = [None]
        expansions = 0
        cap = 40 * num_vertices + 200

        def cands(v):
            c = [w for w in g.neighbors(v) if w in Uset and w not in used]
            rng.shuffle(c)
            # prefer vertices with many free neighbours
            c.sort(key=lambda w: sum(1 for z in g.neighbors(w) if z in Uset and z not in used))
            return c

        stack[0] = cands(s)
        while stack and len(path) < num_vertices and expansions < cap:
            if not stack[-1]:
                stack.pop()
                used.discard(path.pop())
                continue
            w = stack[-1].pop()
            expansions += 1
            path.append(w)
            used.add(w)
            stack.append(cands(w))
        if len(path) == num_vertices:
            return path
    raise PathSearchError(f"no path on {num_vertices} vertices found", attempts)


# ---------------------------------------------------------------- good paths


@dataclass
class GoodPath:
    """Path from ``vertices[0]`` with an edge set R and per-edge certificates."""

    vertices: list[int]
    R: list[Edge]
    certs: dict[Edge, tuple[int, ...]] = field(default_factory=dict)

    @classmethod
    def from_edge(cls, x: int, y: int) -> "GoodPath":
        e = _key(x, y)
        return cls([x, y], [e], {e: (x, y)})

    @property
    def start(self) -> int:
        return self.vertices[0]

    def __len__(self) -> int:
        return len(self.vertices)

    def end_vertex(self, e: Edge) -> int:
        return self.certs[e][-1]

    def oriented_R(self) -> list[tuple[int, int]]:
        """R edges as (x, y) with x earlier on the path than y."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        return [(a, b) if pos[a] < pos[b] else (b, a) for a, b in self.R]

    def validate(self, g: Graph, k: float | None = None) -> None:
        vs = set(self.vertices)
        validate_path(g, self.vertices)
        for e in self.R:
            if e not in self.certs:
                raise ValueError(f"no certificate for {e}")
            cert = self.certs[e]
            validate_path(g, cert, vs)
            if cert[0] != self.start:
                raise ValueError("certificate does not start at the path's first vertex")
            if _key(cert[-2], cert[-1]) != e:
                raise ValueError(f"certificate for {e} does not end with it")
            used = {_key(a, b) for a, b in zip(cert, cert[1:])}
            if not set(self.R) <= used:
                raise ValueError(f"certificate for {e} misses an edge of R")
        if k is not None and len(self.R) < len(self.vertices) / (2 * k):
            raise ValueError("R is too small for the rotation parameter")


def _replace_edge(seq: Sequence[int], a: int, b: int, inner: Sequence[int]) -> list[int]:
    """Replace the consecutive pair a,b (either order) in ``seq`` by a, inner..., b."""
    for i in range(len(seq) - 1):
        if seq[i] == a and seq[i + 1] == b:
            return list(seq[: i + 1]) + list(inner) + list(seq[i + 1:])
        if seq[i] == b and seq[i + 1] == a:
            return list(seq[: i + 1]) + list(reversed(inner)) + list(seq[i + 1:])
    raise ValueError(f"edge ({a},{b}) not on sequence")


def apply_extension(gp: GoodPath, edge: tuple[int, int], path: Sequence[int]) -> GoodPath:
    """Replace R-edge ``edge`` = (x, y) of ``gp`` by ``path`` = x, q1, ..., qk, y (k >= 2)."""
    x, y = path[0], path[-1]
    e = _key(x, y)
    if e != _key(*edge) or e not in gp.certs:
        raise ValueError("extension must replace an edge of R")
    inner = list(path[1:-1])
    if len(inner) < 2:
        raise ValueError("an extension needs at least two new vertices")
    base = gp.certs[e]
    a, b = base[-2], base[-1]
    # orient the new segment so that it runs a -> b
    if a != x:
        inner = inner[::-1]
    q1, qk = inner[0], inner[-1]
    new_R = [f for f in gp.R if f != e] + [_key(q1, inner[1]), _key(qk, b)]
    certs = {}
    for f in gp.R:
        if f != e:
            certs[f] = tuple(_replace_edge(gp.certs[f], a, b, inner))
    certs[_key(qk, b)] = tuple(list(base[:-1]) + inner + [b])
    certs[_key(q1, inner[1])] = tuple(list(base) + inner[::-1])
    verts = _replace_edge(gp.vertices, a, b, inner)
    return GoodPath(verts, new_R, certs)


def extension_step(k: int, current: int, target: int) -> int:
    """New vertices for the next extension of a path on ``current`` vertices
    growing to ``target`` vertices."""
    remaining = target - current
    return k - 1 if remaining >= 2 * k - 1 else remaining


def extend_good_path(
    g: Graph,
    goodpaths: list[GoodPath],
    S: Iterable[int],
    k: int,
    lengths: Sequence[int],
    *,
    seed: int = 0,
    rng=None,
    budget_factor: int = 50,
    order: Sequence[int] | None = None,
) -> tuple[list[GoodPath], int]:
    """Lengthen one good path by ``lengths[j]`` vertices taken from ``S``.

    Every R edge x_i y_i of every path is a candidate pair; the first
    x_i,y_i-path of ``lengths[j] + 1`` edges found through the free part of
    ``S`` replaces that edge.  Returns the updated list and the index j.
    """
    if rng is None:
        rng = make_rng(seed)
    used = {v for p in goodpaths for v in p.vertices}
    free = set(S) - used
    pairs, plens, owner = [], [], []
    idx = order if order is not None else range(len(goodpaths))
    for j in idx:
        if lengths[j] < 2:
            raise ValueError("extensions must add at least two vertices")
        for xy in goodpaths[j].oriented_R():
            pairs.append(xy)
            plens.append(lengths[j] + 1)
            owner.append(j)
    if not pairs:
        raise PathSearchError("no R edges to extend", 0)
    i, path = find_path_of_length(g, pairs, free, plens, rng=rng, budget_factor=budget_factor)
    j = owner[i]
    out = list(goodpaths)
    out[j] = apply_extension(goodpaths[j], pairs[i], path)
    return out, j


def grow_good_paths(
    g: Graph,
    seeds: list[tuple[int, int]],
    S: Iterable[int],
    k: int,
    target: int,
    *,
    rng,
    budget_factor: int = 50,
    pool_limit: float | None = None,
    max_rounds: int = 10_000,
) -> tuple[int, GoodPath]:
    """Grow good paths from seed edges until one has ``target`` vertices.

    Returns (seed index, good path).  When the total size passes
    ``pool_limit``, shortest paths are discarded (smallest start first).
    """
    S = set(S)
    paths = {i: GoodPath.from_edge(x, y) for i, (x, y) in enumerate(seeds)}
    for _ in range(max_rounds):
        for i, p in paths.items():
            if len(p) >= target:
                return i, p
        if not paths:
            break
        ids = sorted(paths, key=lambda i: (-len(paths[i]), i))
        lst = [paths[i] for i in ids]
        lens = [extension_step(k, len(p), target) for p in lst]
        try:
            new, j = extend_good_path(g, lst, S, k, lens, rng=rng, budget_factor=budget_factor)
        except PathSearchError:
            break
        paths[ids[j]] = new[j]
        if len(new[j]) >= target:
            return ids[j], new[j]
        if pool_limit is not None:
            while paths and sum(len(p) for p in paths.values()) > pool_limit:
                drop = min(paths, key=lambda i: (len(paths[i]), paths[i].start))
                del paths[drop]
    raise PathSearchError("good paths stopped growing before reaching the target")


# ---------------------------------------------------------------- connectors


@dataclass
class Connector:
    """An l-vertex connector built from two good paths sharing their start."""

    vertices: tuple[int, ...]
    plus: tuple[int, ...]
    minus: tuple[int, ...]
    side1: GoodPath | None
    side2: GoodPath | None
    fallback_path: tuple[int, ...] | None = None
    gamma_nominal: float = 0.0
    k: int = 0
    graph: Graph | None = field(default=None, repr=False, compare=False)

    @property
    def l(self) -> int:
        return len(self.vertices)

    @property
    def gamma(self) -> float:
        """Achieved end-set ratio min(|H⁺|, |H⁻|) / |H|."""
        return min(len(self.plus), len(self.minus)) / len(self.vertices)

    def hub(self) -> int:
        return self.side1.start

    def _cert_by_end(self, side: GoodPath) -> dict[int, tuple[int, ...]]:
        return {c[-1]: c for c in side.certs.values()}

    def validate(self, g: Graph | None = None) -> None:
        g = g or self.graph
        if set(self.plus) & set(self.minus):
            raise ValueError("end-sets intersect")
        if not set(self.plus) | set(self.minus) <= set(self.vertices):
            raise ValueError("end-sets leave the connector")
        if self.fallback_path is not None:
            validate_path(g, self.fallback_path, self.vertices)
            return
        for side in (self.side1, self.side2):
            side.validate(g)
        if set(self.side1.vertices) & set(self.side2.vertices) != {self.side1.start} or \
                self.side1.start != self.side2.start:
            raise ValueError("sides must meet exactly at their common start")
        if set(self.side1.vertices) | set(self.side2.vertices) != set(self.vertices):
            raise ValueError("sides do not cover the connector")
        if set(self.plus) != {c[-1] for c in self.side1.certs.values()}:
            raise ValueError("H+ differs from the side-1 certificate ends")
        if set(self.minus) != {c[-1] for c in self.side2.certs.values()}:
            raise ValueError("H- differs from the side-2 certificate ends")

    def to_text(self) -> str:
        lines = [f"connector l={self.l} gamma={self.gamma!r} k={self.k}"]
        lines.append("vertices " + " ".join(map(str, self.vertices)))
        lines.append("plus " + " ".join(map(str, self.plus)))
        lines.append("minus " + " ".join(map(str, self.minus)))
        if self.fallback_path is not None:
            lines.append("path " + " ".join(map(str, self.fallback_path)))
        else:
            for name, side in (("side1", self.side1), ("side2", self.side2)):
                lines.append(f"{name} " + " ".join(map(str, side.vertices)))
                for e in side.R:
                    lines.append(f"R {e[0]} {e[1]} : " + " ".join(map(str, side.certs[e])))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, g: Graph) -> "Connector":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(tok.split("=") for tok in lines[0].split()[1:])
        fields: dict = {}
        sides: list[GoodPath] = []
        fallback = None
        for ln in lines[1:]:
            tag, _, rest = ln.partition(" ")
            if tag in ("vertices", "plus", "minus"):
                fields[tag] = tuple(int(x) for x in rest.split())
            elif tag == "path":
                fallback = tuple(int(x) for x in rest.split())
            elif tag in ("side1", "side2"):
                sides.append(GoodPath([int(x) for x in rest.split()], [], {}))
            elif tag == "R":
                left, _, right = rest.partition(":")
                a, b = (int(x) for x in left.split())
                e = _key(a, b)
                sides[-1].R.append(e)
                sides[-1].certs[e] = tuple(int(x) for x in right.split())
            else:
                raise ValueError(f"unknown connector line {ln!r}")
        c = cls(
            fields["vertices"], fields["plus"], fields["minus"],
            sides[0] if sides else None, sides[1] if len(sides) > 1 else None,
            fallback_path=fallback, k=int(head.get("k", 0)), graph=g,
        )
        c.gamma_nominal = nominal_gamma(g.n)
        c.validate(g)
        return c


def nominal_gamma(n: int) -> float:
    """log log n / (16 log n)."""
    if n < 3:
        return 0.0
    return math.log(math.log(n)) / (16 * math.log(n))


def proof_rotation_k(n: int) -> int:
    """Rotation parameter ⌈4 log n / log log n⌉, at least 3 (the smallest the construction accepts)."""
    if n < 16:
        return 3
    return max(3, math.ceil(4 * math.log(n) / math.log(math.log(n))))


def hamilton_path(c: Connector, x: int, y: int) -> list[int]:
    """Explicit x,y-Hamilton path of the connector, checked against the graph."""
    if x not in c.plus:
        raise ValueError(f"{x} is not in H+")
    if y not in c.minus:
        raise ValueError(f"{y} is not in H-")
    if c.fallback_path is not None:
        path = list(c.fallback_path)
        if path[0] != x:
            path.reverse()
    else:
        c1 = c._cert_by_end(c.side1)[x]
        c2 = c._cert_by_end(c.side2)[y]
        path = list(reversed(c1)) + list(c2[1:])
    if c.graph is not None:
        validate_path(c.graph, path, c.vertices)
    if path[0] != x or path[-1] != y:
        raise AssertionError("hamilton path endpoints do not match the request")
    return path


def _length_two_paths(g: Graph, region: set[int], count: int, exclude: set[int]) -> list[tuple[int, int, int]]:
    """Greedy disjoint paths y x y' inside ``region`` scanning x ascending."""
    used = set(exclude)
    out = []
    for x in sorted(region):
        if len(out) >= count:
            break
        if x in used:
            continue
        nb = [v for v in g.neighbors(x) if v in region and v not in used]
        if len(nb) < 2:
            continue
        y, y2 = nb[0], nb[1]
        out.append((y, x, y2))
        used.update((x, y, y2))
    return out


def build_connector(
    g: Graph,
    l0: int,
    region: Iterable[int],
    seed: int = 0,
    *,
    k: int | None = None,
    m: int | None = None,
    budget_factor: int = 50,
    max_hub_retries: int | None = None,
    side2_retries: int = 4,
) -> Connector:
    """Build an l0-vertex connector inside ``region``.

    Disjoint length-2 paths y_i x_i y'_i are chosen greedily; the remaining
    region is split at random into S1 and S2.  Good paths are grown in S1
    from all edges x_i y_i until one, with hub x_j, reaches its target length;
    then a single good path is grown in S2 from x_j y'_j, with up to
    ``side2_retries`` randomized tries.  If all fail, hub j is dropped and
    side 1 is regrown.  When l0 < max(2k, 7) the connector is a plain path
    whose end-sets are its two ends (below 7 vertices one side would need a
    single-vertex extension, which leaves no room for a new R edge).
    """
    region = set(region)
    if l0 < 2:
        raise ValueError("a connector needs at least two vertices")
    if l0 > len(region):
        raise ValueError("region smaller than the requested connector")
    rng = make_rng(seed)
    k = proof_rotation_k(g.n) if k is None else k
    if k < 3:
        raise ValueError("rotation parameter must be at least 3")
    gamma_nom = nominal_gamma(g.n)
    if l0 < max(2 * k, 7):
        try:
            path = find_path(g, region, l0, rng=rng)
        except PathSearchError as exc:
            raise ConnectorError(f"short connector: {exc}", {"stage": "fallback"}) from exc
        c = Connector(tuple(sorted(path)), (path[0],), (path[-1],), None, None,
                      fallback_path=tuple(path), gamma_nominal=gamma_nom, k=k, graph=g)
        c.validate(g)
        return c
    if m is None:
        nr = len(region)
        m = max(1, min(math.floor(nr / math.log(max(nr, 3))), 2))
    # keep at least 2·l0 region vertices outside the seed paths
    n_seeds = min(4 * m, max(1, (len(region) - 2 * l0) // 3))
    tri = _length_two_paths(g, region, n_seeds, set())
    if not tri:
        raise ConnectorError("no length-2 paths in region", {"stage": "seeds"})
    rest = sorted(region - {v for t in tri for v in t})
    perm = rng.permutation(len(rest))
    half = len(rest) // 2
    S1 = {rest[i] for i in perm[:half]}
    S2 = {rest[i] for i in perm[half:]}
    target1 = math.ceil((l0 - 1) / 2) + 1
    target2 = math.floor((l0 - 1) / 2) + 1
    alive = list(range(len(tri)))
    retries = max_hub_retries if max_hub_retries is not None else len(tri)
    state: dict = {"stage": "side1", "seeds": tri}
    for _ in range(retries):
        if not alive:
            break
        seeds1 = [(tri[i][1], tri[i][0]) for i in alive]
        # while growing side 1 the other seeds' y' vertices must stay untouched
        try:
            j_local, p1 = grow_good_paths(g, seeds1, S1, k, target1, rng=rng,
                                          budget_factor=budget_factor, pool_limit=g.n / 6)
        except PathSearchError as exc:
            state.update(stage="side1", error=str(exc))
            raise ConnectorError("side-1 growth failed", state) from exc
        j = alive[j_local]
        y, x, y2 = tri[j]
        p2 = None
        for _ in range(side2_retries):
            try:
                _, p2 = grow_good_paths(g, [(x, y2)], S2, k, target2, rng=rng,
                                        budget_factor=budget_factor)
                break
            except PathSearchError:
                continue
        if p2 is None:
            alive.remove(j)
            state.setdefault("dropped_hubs", []).append(x)
            continue
        plus = [c[-1] for c in p1.certs.values()]
        minus = [c[-1] for c in p2.certs.values()]
        # distinct R edges give distinct certificate ends
        assert len(set(plus)) == len(plus) and len(set(minus)) == len(minus)
        verts = tuple(sorted(set(p1.vertices) | set(p2.vertices)))
        assert len(verts) == l0
        c = Connector(verts, tuple(sorted(plus)), tuple(sorted(minus)), p1, p2,
                      gamma_nominal=gamma_nom, k=k, graph=g)
        c.validate(g)
        return c
    state.update(stage="side2")
    raise ConnectorError("no hub admitted good paths on both sides", state)


# ---------------------------------------------------------------- Pósa rotations


def posa_hamilton_cycle(
    g: Graph,
    seed: int = 0,
    *,
    vertices: Iterable[int] | None = None,
    max_rotations: int | None = None,
    restarts: int = 5,
) -> list[int]:
    """Hamilton cycle of ``g[vertices]`` by extension and Pósa rotation.

    The path is extended greedily (fewest free neighbours first); when stuck,
    the end is rotated, preferring rotations whose new end has a free
    neighbour.  Once the path spans, rotations continue until the ends are
    adjacent.  Returns the cycle as a vertex list (closing edge implied).
    """
    V = sorted(set(range(g.n)) if vertices is None else set(vertices))
    nV = len(V)
    if nV < 3:
        raise PathSearchError("a Hamilton cycle needs at least three vertices")
    inV = set(V)
    nbrs = {v: [w for w in g.neighbors(v) if w in inV] for v in V}
    if any(len(nbrs[v]) < 2 for v in V):
        raise PathSearchError("a vertex has fewer than two neighbours")
    rng = make_rng(seed)
    budget = max_rotations if max_rotations is not None else 50 * nV + 2000
    total = 0
    for _ in range(restarts):
        start = V[int(rng.integers(nV))]
        path = [start]
        pos = {start: 0}

        def free_deg(w):
            return sum(1 for z in nbrs[w] if z not in pos)

        rotations = 0
        while rotations < budget:
            end = path[-1]
            if len(path) == nV:
                if path[0] in nbrs[end] and nV >= 3:
                    cyc = list(path)
                    validate_path(g, cyc, V)
                    if not g.has_edge(cyc[0], cyc[-1]):
                        raise AssertionError("cycle not closed")
                    return cyc
            free = [w for w in nbrs[end] if w not in pos]
            if free:
                fd = [free_deg(w) for w in free]
                best = min(fd)
                opts = [w for w, f in zip(free, fd) if f == best]
                w = opts[int(rng.integers(len(opts)))]
                pos[w] = len(path)
                path.append(w)
                continue
            # rotation: end has neighbour path[i]; new path reverses the tail after i
            rotations += 1
            total += 1
            if rng.random() < 0.02:
                path.reverse()
                for i, v in enumerate(path):
                    pos[v] = i
                continue
            choices = [pos[w] for w in nbrs[end] if pos[w] < len(path) - 2]
            if not choices:
                path.reverse()
                for i, v in enumerate(path):
                    pos[v] = i
                continue
            good = [i for i in choices if any(z not in pos for z in nbrs[path[i + 1]])]
            if len(path) == nV:
                good = [i for i in choices if path[0] in nbrs[path[i + 1]]] or []
            pick_from = good if good else choices
            i = pick_from[int(rng.integers(len(pick_from)))]
            tail = path[i + 1:]
            tail.reverse()
            path[i + 1:] = tail
            for t, v in enumerate(tail, start=i + 1):
                pos[v] = t
    raise PathSearchError(f"no Hamilton cycle after {total} rotations", total)
