"""Grouped graphs, maximum bipartite matchings with Hall violators, d-matchings."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graphs import Graph, format_graph


@dataclass(frozen=True)
class GroupedGraph:
    """Bipartite graph whose two sides are families of disjoint base-vertex sets.

    Left class ``i`` and right class ``j`` are adjacent iff some base edge joins
    ``left[i]`` and ``right[j]``; edges touching a vertex that belongs to both
    classes are ignored.
    """

    base: Graph
    left: tuple[frozenset[int], ...]
    right: tuple[frozenset[int], ...]
    adj: tuple[tuple[int, ...], ...]

    @property
    def n_left(self) -> int:
        return len(self.left)

    @property
    def n_right(self) -> int:
        return len(self.right)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.adj) for j in row]

    def witness_edge(self, i: int, j: int) -> tuple[int, int]:
        """A base edge (x, y) with x in left[i], y in right[j]; smallest x, then y."""
        Li, Rj = self.left[i], self.right[j]
        for x in sorted(Li - Rj):
            for y in self.base.neighbors(x):
                if y in Rj and y not in Li:
                    return x, y
        raise KeyError(f"classes {i} and {j} are not adjacent")

    def to_text(self) -> str:
        out = [format_graph(self.base).rstrip("\n")]
        for name, fam in (("left", self.left), ("right", self.right)):
            out.append(f"{name} {len(fam)}")
            out.extend(" ".join(map(str, sorted(s))) for s in fam)
        return "\n".join(out) + "\n"


def _as_family(family: Iterable) -> tuple[frozenset[int], ...]:
    out = []
    for item in family:
        if isinstance(item, (int,)) or hasattr(item, "__index__"):
            out.append(frozenset((int(item),)))
        else:
            out.append(frozenset(int(x) for x in item))
    return tuple(out)


def _check_disjoint(family: Sequence[frozenset[int]], name: str) -> dict[int, int]:
    owner: dict[int, int] = {}
    for i, s in enumerate(family):
        for x in s:
            if x in owner:
                raise ValueError(f"{name} family: classes {owner[x]} and {i} share vertex {x}")
            owner[x] = i
    return owner


def grouped_graph(g: Graph, left: Iterable, right: Iterable, *, allow_overlap: bool = False) -> GroupedGraph:
    """Build the grouped graph; bare integers are wrapped as singleton classes."""
    L, R = _as_family(left), _as_family(right)
    lown = _check_disjoint(L, "left")
    rown = _check_disjoint(R, "right")
    if not allow_overlap and set(lown) & set(rown):
        raise ValueError("left and right families overlap (pass allow_overlap=True)")
    adj = []
    for i, Li in enumerate(L):
        row = set()
        for x in Li:
            for y in g.neighbors(x):
                j = rown.get(y)
                if j is None or y in Li or x in R[j]:
                    continue
                row.add(j)
        adj.append(tuple(sorted(row)))
    return GroupedGraph(g, L, R, tuple(adj))


@dataclass
class MatchingResult:
    """Maximum matching ``pairs[i] = j`` (left i to right j) plus a Hall violator.

    ``violator`` is a set S of left indices with ``|N(S)| = |S| - deficiency``;
    it is empty when the matching saturates the left side.
    """

    pairs: dict[int, int]
    n_left: int
    violator: tuple[int, ...] = ()
    violator_neighbors: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def deficiency(self) -> int:
        return self.n_left - len(self.pairs)

    @property
    def perfect(self) -> bool:
        return len(self.pairs) == self.n_left


def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> MatchingResult:
    """Maximum matching of a bipartite graph given left adjacency lists.

    Phases search shortest augmenting paths by BFS, then augment along
    vertex-disjoint paths by DFS trying left vertices in ascending order.
    """
    n_left = len(adj)
    INF = 1 << 60
    mate_l = [-1] * n_left
    mate_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if mate_l[u] < 0:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = mate_r[v]
                if w < 0:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(root: int) -> bool:
        # iterative DFS along layered edges
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = mate_r[v]
                if w < 0:
                    path.append((u, v))
                    for a, b in path:
                        mate_l[a] = b
                        mate_r[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if mate_l[u] < 0:
                dfs(u)

    pairs = {u: mate_l[u] for u in range(n_left) if mate_l[u] >= 0}
    # alternating reachability from free left vertices gives the Hall violator
    seen_l = {u for u in range(n_left) if mate_l[u] < 0}
    seen_r: set[int] = set()
    q = deque(sorted(seen_l))
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in seen_r:
                seen_r.add(v)
                w = mate_r[v]
                if w >= 0 and w not in seen_l:
                    seen_l.add(w)
                    q.append(w)
    res = MatchingResult(pairs, n_left)
    if seen_l:
        res.violator = tuple(sorted(seen_l))
        res.violator_neighbors = tuple(sorted(seen_r))
    _assert_matching(adj, pairs)
    return res


def _assert_matching(adj: Sequence[Sequence[int]], pairs: dict[int, int]) -> None:
    used = set()
    for u, v in pairs.items():
        if v not in adj[u] or v in used:
            raise AssertionError(f"invalid matching edge ({u}, {v})")
        used.add(v)


def max_matching(h: GroupedGraph) -> MatchingResult:
    return hopcroft_karp(h.adj, h.n_right)


def d_matching(g: Graph, A: Sequence[int], B: Iterable[int], d: int) -> tuple[dict[int, tuple[int, ...]] | None, tuple[int, ...]]:
    """Disjoint sets X_a ⊆ N(a, B) of size ``d`` for every a in A.

    Returns ``(assignment, ())`` on success or ``(None, violator)`` where the
    violator S ⊆ A has ``|N(S, B)| < d|S|``.
    """
    A = list(A)
    Bl = sorted(set(B))
    if set(A) & set(Bl):
        raise ValueError("A and B must be disjoint")
    if d < 1:
        raise ValueError("d must be positive")
    bindex = {b: i for i, b in enumerate(Bl)}
    rows = [tuple(sorted(bindex[y] for y in g.neighbors(a) if y in bindex)) for a in A]
    adj = [rows[i // d] for i in range(len(A) * d)]
    res = hopcroft_karp(adj, len(Bl))
    if not res.perfect:
        viol = tuple(sorted({A[i // d] for i in res.violator}))
        return None, viol
    out = {}
    for idx, a in enumerate(A):
        out[a] = tuple(sorted(Bl[res.pairs[idx * d + c]] for c in range(d)))
    return out, ()
