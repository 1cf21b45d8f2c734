"""Trees, combs, teeth and balanced tree splitting.

Tooth length convention: lengths are edge counts.  ``make_comb(n, k)`` builds
a spine on ``n/k`` vertices and hangs ``k - 1`` further vertices below each
spine vertex, so every column holds ``k`` vertices and every tooth (leaf up to
and including its spine vertex) has ``k - 1`` edges.  Use
:func:`comb_tooth_length` to convert the comb parameter into the edge count
expected by :func:`find_teeth`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph, format_graph, make_rng, parse_graph


class Tree(Graph):
    """A connected acyclic graph, optionally rooted."""

    __slots__ = ("root",)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), root: int | None = None):
        super().__init__(n, edges)
        if n < 1:
            raise ValueError("a tree needs at least one vertex")
        if self.m != n - 1:
            raise ValueError(f"a tree on {n} vertices needs {n - 1} edges, got {self.m}")
        if len(_reach(self, 0)) != n:
            raise ValueError("edges do not form a connected graph")
        if root is not None and not 0 <= root < n:
            raise ValueError("root out of range")
        self.root = root

    @classmethod
    def from_graph(cls, g: Graph, root: int | None = None) -> "Tree":
        return cls(g.n, g.edges(), root=root)

    def leaves(self) -> list[int]:
        if self.n == 1:
            return []
        return [v for v in range(self.n) if self.degree(v) == 1]

    def path_between(self, u: int, v: int, within: set[int] | None = None) -> list[int]:
        parent = _bfs_parents(self, u, within)
        if v not in parent:
            raise ValueError(f"{v} not reachable from {u}")
        out = [v]
        while out[-1] != u:
            out.append(parent[out[-1]])
        return out[::-1]


def _reach(g: Graph, start: int, within: set[int] | None = None) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in g.neighbors(x):
            if y not in seen and (within is None or y in within):
                seen.add(y)
                stack.append(y)
    return seen


def _bfs_parents(g: Graph, start: int, within: set[int] | None = None) -> dict[int, int | None]:
    parent: dict[int, int | None] = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if y not in parent and (within is None or y in within):
                parent[y] = x
                queue.append(y)
    return parent


def is_subtree(t: Graph, vertices: Iterable[int]) -> bool:
    vs = set(vertices)
    if not vs:
        return False
    return len(_reach(t, next(iter(vs)), vs)) == len(vs)


# ---------------------------------------------------------------- constructions


def make_comb(n: int, k: int) -> Tree:
    """Comb with a spine ``0..n/k-1``; spine vertex ``i`` carries the tooth
    ``n/k + i(k-1), ..., n/k + i(k-1) + k-2``."""
    if k < 1 or n < 1:
        raise ValueError("n and k must be positive")
    if n % k:
        raise ValueError(f"k={k} does not divide n={n}")
    spine = n // k
    edges = [(i, i + 1) for i in range(spine - 1)]
    for i in range(spine):
        prev = i
        for j in range(k - 1):
            v = spine + i * (k - 1) + j
            edges.append((prev, v))
            prev = v
    return Tree(n, edges)


def comb_tooth_length(k: int) -> int:
    """Edge length of the teeth of ``make_comb(n, k)``."""
    return k - 1


def comb_tooth(n: int, k: int, i: int) -> list[int]:
    """Vertices of tooth ``i`` of ``make_comb(n, k)`` from spine vertex to leaf."""
    spine = n // k
    return [i] + [spine + i * (k - 1) + j for j in range(k - 1)]


def random_tree(n: int, max_degree: int | None, seed: int) -> Tree:
    """Random recursive tree: vertex ``i`` attaches to a uniform earlier vertex
    with spare degree, then labels are shuffled."""
    if n < 1:
        raise ValueError("n must be positive")
    if max_degree is not None and max_degree < 2 and n > 2:
        raise ValueError("max_degree must be at least 2 for n > 2")
    rng = make_rng(seed)
    deg = [0] * n
    open_ = [0]
    pos = {0: 0}
    edges = []
    for v in range(1, n):
        idx = int(rng.integers(len(open_)))
        u = open_[idx]
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
        for w in (u, v):
            full = max_degree is not None and deg[w] >= max_degree
            if full and w in pos:
                i = pos.pop(w)
                last = open_.pop()
                if last != w:
                    open_[i] = last
                    pos[last] = i
            elif not full and w not in pos:
                pos[w] = len(open_)
                open_.append(w)
    perm = rng.permutation(n)
    return Tree(n, [(int(perm[u]), int(perm[v])) for u, v in edges])


# ---------------------------------------------------------------- bare paths


@dataclass(frozen=True)
class BarePath:
    vertices: tuple[int, ...]
    is_tooth: bool = False

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def interior(self) -> tuple[int, ...]:
        return self.vertices[1:-1]


def is_bare_path(t: Tree, vertices: Sequence[int]) -> bool:
    if len(vertices) < 2 or len(set(vertices)) != len(vertices):
        return False
    if any(not t.has_edge(a, b) for a, b in zip(vertices, vertices[1:])):
        return False
    return all(t.degree(v) == 2 for v in vertices[1:-1])


def find_teeth(t: Tree, length: int) -> list[BarePath]:
    """All bare paths with ``length`` edges that start at a leaf.

    Paths run from the leaf towards the tree; when both ends are leaves (the
    tree is a path) the path is reported once, from its smaller leaf.  Teeth
    of a tree that is not a path share at most their non-leaf end.
    """
    if length < 1:
        raise ValueError("tooth length must be at least 1")
    out = []
    for leaf in t.leaves():
        walk = [leaf]
        prev, cur = None, leaf
        ok = True
        while len(walk) <= length:
            if len(walk) > 1 and t.degree(cur) != 2:
                ok = False
                break
            nxt = [y for y in t.neighbors(cur) if y != prev]
            if not nxt:
                ok = False
                break
            prev, cur = cur, nxt[0]
            walk.append(cur)
        if not ok:
            continue
        if t.degree(walk[-1]) == 1 and walk[-1] < leaf:
            continue
        out.append(BarePath(tuple(walk), True))
    return out


@dataclass(frozen=True)
class Forest:
    """What is left after removing bare paths: surviving vertices and edges."""

    n: int
    vertices: frozenset[int]
    edges: tuple[tuple[int, int], ...]

    def components(self) -> list[set[int]]:
        g = Graph(self.n, self.edges)
        left = set(self.vertices)
        comps = []
        while left:
            v = min(left)
            c = _reach(g, v, left)
            comps.append(c)
            left -= c
        return comps


def remove_bare_paths(t: Tree, paths: Sequence[BarePath | Sequence[int]]) -> tuple[Forest, list[tuple[int, ...]]]:
    """Delete the edges of each path, then drop vertices left isolated.

    Returns the forest and, per path, its attachment vertices: ``(x,)`` for a
    tooth (the non-leaf end) and ``(x, y)`` otherwise.
    """
    seqs = [tuple(p.vertices if isinstance(p, BarePath) else p) for p in paths]
    used_edges: set[tuple[int, int]] = set()
    interior: set[int] = set()
    ends: set[int] = set()
    for seq in seqs:
        if not is_bare_path(t, seq):
            raise ValueError(f"not a bare path: {seq}")
        inner = set(seq[1:-1])
        if inner & (interior | ends) or set((seq[0], seq[-1])) & interior:
            raise ValueError(f"path {seq} overlaps another path")
        for a, b in zip(seq, seq[1:]):
            e = (a, b) if a < b else (b, a)
            if e in used_edges:
                raise ValueError(f"path {seq} shares an edge with another path")
            used_edges.add(e)
        interior |= inner
        ends |= {seq[0], seq[-1]}
    kept = [e for e in t.edges() if e not in used_edges]
    alive = {v for e in kept for v in e}
    if t.n == 1:
        alive = {0}
    attachments = []
    for seq in seqs:
        a, b = seq[0], seq[-1]
        if t.degree(a) == 1 and t.degree(b) == 1:
            attachments.append((min(a, b),))
        elif t.degree(a) == 1:
            attachments.append((b,))
        elif t.degree(b) == 1:
            attachments.append((a,))
        else:
            attachments.append((a, b))
    return Forest(t.n, frozenset(alive), tuple(kept)), attachments


def restore_bare_paths(forest: Forest, paths: Sequence[BarePath | Sequence[int]]) -> Tree:
    edges = list(forest.edges)
    for p in paths:
        seq = p.vertices if isinstance(p, BarePath) else p
        edges.extend(zip(seq, seq[1:]))
    return Tree(forest.n, edges)


# ---------------------------------------------------------------- dividing


def _branches(t: Graph, v: int, within: set[int]) -> list[list[int]]:
    """Components of ``within - {v}`` hanging off ``v``, in neighbour order."""
    out = []
    for y in t.neighbors(v):
        if y in within:
            comp = _reach(t, y, within - {v})
            out.append(sorted(comp))
    return out


def _best_subset(sizes: list[int], target2: int) -> tuple[int, list[int]]:
    """Subset of ``sizes`` minimising |2·sum - target2|; returns (gap, indices)."""
    reach = [1]
    for s in sizes:
        reach.append(reach[-1] | (reach[-1] << s))
    final = reach[-1]
    best_sum, best_gap = 0, None
    total = sum(sizes)
    for x in range(total + 1):
        if final >> x & 1:
            gap = abs(2 * x - target2)
            if best_gap is None or gap < best_gap:
                best_sum, best_gap = x, gap
    chosen = []
    x = best_sum
    for i in range(len(sizes) - 1, -1, -1):
        if not (reach[i] >> x & 1):
            chosen.append(i)
            x -= sizes[i]
    return best_gap, chosen[::-1]


def divide_vertices(t: Graph, within: Iterable[int] | None = None) -> tuple[set[int], set[int], int]:
    """Two subtrees covering ``within`` that meet in one vertex with the sizes as
    equal as possible; returns ``(S1, S2, shared)`` with ``|S1| >= |S2|``.

    A balanced split is a global optimum over all (vertex, branch subset)
    choices, hence also a fixed point of every local improvement move, so both
    parts have at least ``|S|/3`` vertices.
    """
    S = set(range(t.n)) if within is None else set(within)
    if len(S) < 2:
        raise ValueError("cannot divide a single-vertex tree")
    size = len(S)
    root = min(S)
    parent = _bfs_parents(t, root, S)
    order = list(parent)
    sub = dict.fromkeys(order, 1)
    for x in reversed(order[1:]):
        sub[parent[x]] += sub[x]
    best = None
    for v in sorted(S):
        # branch sizes in neighbour order, matching _branches
        sizes = [sub[y] if parent.get(y) == v else size - sub[v]
                 for y in t.neighbors(v) if y in S]
        # |S1| = 1 + x, |S2| = 1 + (size - 1 - x)
        gap, chosen = _best_subset(sizes, size - 1)
        if best is None or gap < best[0]:
            best = (gap, v, chosen)
        if gap <= 1:
            break
    gap, v, chosen = best
    br = _branches(t, v, S)
    part = {v}
    for i in chosen:
        part.update(br[i])
    other = (S - part) | {v}
    if len(part) < len(other):
        part, other = other, part
    return part, other, v


def divide(t: Tree) -> tuple[Tree, Tree]:
    """Split ``t`` into two subtrees sharing one vertex, sizes as equal as possible.

    The parts keep the labels of ``t`` via :meth:`Graph.induced`; use
    :func:`divide_vertices` to get the vertex sets directly.
    """
    if t.n < 2:
        raise ValueError("cannot divide a single-vertex tree")
    a, b, _ = divide_vertices(t)
    ta, _ = t.induced(a)
    tb, _ = t.induced(b)
    return Tree.from_graph(ta), Tree.from_graph(tb)


# ---------------------------------------------------------------- splitting


@dataclass(frozen=True)
class TreeSplit:
    S: frozenset[int]
    T1: frozenset[int]
    T2: frozenset[int]
    t1: int
    t2: int
    k: int
    beta: Fraction
    l_in_s: int

    def check(self, t: Tree) -> None:
        """Raise AssertionError unless the split is structurally valid."""
        assert self.S | self.T1 | self.T2 == set(range(t.n))
        assert self.S & self.T1 == {self.t1}
        assert self.S & self.T2 == {self.t2}
        assert not self.T1 & self.T2
        for part in (self.S, self.T1, self.T2):
            assert is_subtree(t, part)
        # T1 and T2 only touch S through t1 and t2
        for x in self.T1 - {self.t1}:
            assert not t.neighbor_set(x) & (self.S - {self.t1})
        for x in self.T2 - {self.t2}:
            assert not t.neighbor_set(x) & (self.S - {self.t2})


def split_level(eps: float | Fraction) -> int:
    """Smallest k with (3/4)^k < eps; eps >= 1 gives k = 0 (S is the whole tree)."""
    e = Fraction(eps)
    if e <= 0:
        raise ValueError("eps must be positive")
    if e >= 1:
        return 0
    k = 1
    while Fraction(3, 4) ** k >= e:
        k += 1
    return k


def split_min_size(eps: float | Fraction) -> int:
    """Smallest tree size accepted by :func:`split_tree` (12·(4/3)^k rounded up)."""
    k = split_level(eps)
    return math.ceil(12 * Fraction(4, 3) ** k) if k else 1


def _attachments(t: Graph, S: set[int]) -> dict[int, list[int]]:
    """Outside vertices adjacent to S, grouped by the S vertex they hang from."""
    out: dict[int, list[int]] = {}
    for v in S:
        for y in t.neighbors(v):
            if y not in S:
                out.setdefault(v, []).append(y)
    return out


def _median(t: Graph, S: set[int], a: int, b: int, c: int) -> int:
    pa = _bfs_parents(t, a, S)

    def path_to(x):
        out = [x]
        while pa[out[-1]] is not None:
            out.append(pa[out[-1]])
        return out

    on_ab = set(path_to(b))
    for x in path_to(c):
        if x in on_ab:
            return x
    raise AssertionError("vertices not connected inside S")


def split_tree(t: Tree, L: Iterable[int], eps: float | Fraction, avoid: Iterable[int] = ()) -> TreeSplit:
    """Find subtrees S, T1, T2 covering ``t`` with ``|S| <= eps·n`` and
    ``|S ∩ L| >= 6^-k |L|``; T1 and T2 are disjoint and each meets S once.

    Each level halves S with :func:`divide_vertices` and keeps the half with
    more of ``L``; when three outside pieces would hang from S, S is cut at
    the median of their attachment vertices.  Single-vertex parts are chosen
    outside ``avoid`` and ``L`` where possible.
    """
    n = t.n
    L = set(L)
    if not L <= set(range(n)):
        raise ValueError("L must be a subset of V(t)")
    k = split_level(eps)
    n0 = split_min_size(eps)
    if n < max(n0, 2):
        raise ValueError(f"tree has {n} vertices, needs at least n0={max(n0, 2)} for eps={eps}")
    S = set(range(n))
    for level in range(1, k + 1):
        if len(S) <= Fraction(3, 4) ** level * n:
            continue
        S1, S2, s = divide_vertices(t, S)
        if len(S2 & L) > len(S1 & L):
            S1, S2 = S2, S1
        att = {v for v in _attachments(t, S1)}
        if len(att) <= 2:
            S = S1
            continue
        a, b, c = sorted(att)
        u = _median(t, S1, a, b, c)
        parts = []
        free = []
        for br in _branches(t, u, S1):
            brs = set(br)
            hits = [x for x in (a, b, c) if x in brs]
            (parts if hits else free).append(brs)
        free_set = set().union(*free) if free else set()
        best = None
        for brs in parts + [set()]:
            cand = {u} | brs | free_set
            if len(_attachments(t, cand)) > 2:
                continue
            score = len(cand & L)
            if best is None or score > best[0]:
                best = (score, cand)
        S = best[1]
    att = _attachments(t, S)
    avoid = set(avoid) | L
    pts = sorted(att)
    assert len(pts) <= 2
    if len(pts) < 2:
        taken = set(pts)
        pool = sorted(S - taken, key=lambda v: (v in avoid, v))
        pts = sorted(pts + pool[: 2 - len(pts)])
    t1, t2 = pts
    outside = set(range(n)) - S
    T = []
    for ti in (t1, t2):
        comp = {ti}
        for y in att.get(ti, []):
            comp |= _reach(t, y, outside)
        T.append(frozenset(comp))
    split = TreeSplit(frozenset(S), T[0], T[1], t1, t2, k, Fraction(1, 6**k), len(S & L))
    return split


def split_spines(t: Tree, length: int, eps: float | Fraction) -> tuple[TreeSplit, int]:
    """:func:`split_tree` with L the leaves of teeth with ``length`` edges.

    Returns the split and the number of those teeth lying wholly inside S.
    """
    teeth = find_teeth(t, length)
    L = {p.vertices[0] for p in teeth}
    tooth_vertices = {v for p in teeth for v in p.vertices}
    split = split_tree(t, L, eps, avoid=tooth_vertices)
    split = _repick_free_points(t, split, teeth)
    inside = sum(1 for p in teeth if set(p.vertices) <= split.S and split.t1 not in p.vertices
                 and split.t2 not in p.vertices)
    return split, inside


def _repick_free_points(t: Tree, split: TreeSplit, teeth: list[BarePath]) -> TreeSplit:
    """Move single-vertex T1/T2 onto vertices of S touching the fewest teeth.

    When every vertex of S lies on a tooth (a comb with S = T), the two points
    should share a tooth so that only one tooth is lost.
    """
    free = [i for i, (T, x) in enumerate(((split.T1, split.t1), (split.T2, split.t2))) if len(T) == 1]
    if not free:
        return split
    on = {}
    for j, p in enumerate(teeth):
        for v in p.vertices:
            on.setdefault(v, set()).add(j)
    pts = [split.t1, split.t2]
    for i in free:
        fixed = {pts[1 - i]} if (1 - i) not in free or i == free[-1] else set()
        hit = set().union(*(on.get(x, set()) for x in fixed))
        cands = [v for v in sorted(split.S) if v not in fixed]
        pts[i] = min(cands, key=lambda v: (len(on.get(v, set()) - hit), v))
    t1, t2 = pts
    return replace(split, T1=frozenset({t1}) if 0 in free else split.T1,
                   T2=frozenset({t2}) if 1 in free else split.T2, t1=t1, t2=t2)


def teeth_inside(t: Tree, split: TreeSplit, length: int) -> list[BarePath]:
    """Teeth of ``t`` with ``length`` edges contained in S and avoiding t1, t2."""
    return [
        p for p in find_teeth(t, length)
        if set(p.vertices) <= split.S and split.t1 not in p.vertices and split.t2 not in p.vertices
    ]


# ---------------------------------------------------------------- files


def format_tree(t: Tree) -> str:
    return format_graph(t, tree=True)


def parse_tree(text: str) -> Tree:
    g, _ = parse_graph(text)
    return Tree.from_graph(g)


def write_tree(path, t: Tree) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_tree(t))


def read_tree(path) -> Tree:
    with open(path, newline="") as fh:
        return parse_tree(fh.read())


def bfs_order(t: Graph, root: int, within: set[int] | None = None) -> list[int]:
    return list(_bfs_parents(t, root, within))


def subtree_sizes(t: Tree) -> np.ndarray:
    parent = _bfs_parents(t, 0)
    order = list(parent)
    size = np.ones(t.n, dtype=np.int64)
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    return size
