"""Sparse undirected graphs, seeded random generation and expansion checkers.

Random graphs use numpy's PCG64 generator: ``sample_gnp(n, p, seed)`` draws one
float64 ``u = rng.random()`` per vertex pair, iterating pairs row-major over
``i < j`` (``(0,1), (0,2), ..., (0,n-1), (1,2), ...``) and keeps the pair iff
``u < p``.  The stream is drawn in blocks, which does not change the values.

Every checker returns a :class:`PropertyReport`.  Exact verdicts come from
full enumeration (bitmask tables for ``n <= 20``); above the exact thresholds
a verdict of ``holds`` only means that a seeded randomized search found no
violation, and the report says so in ``mode``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

EXACT_PAIR_LIMIT = 10**6
MASK_LIMIT = 20
DDR_MASK_LIMIT = 18
_BLOCK = 1 << 22


def derive_seed(seed: int, *keys: int) -> int:
    """Derive an independent 64-bit seed from ``seed`` and a key path."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


class Graph:
    """Immutable simple undirected graph on ``{0, ..., n-1}``."""

    __slots__ = ("_n", "_adj", "_sets", "_m", "_cache")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        pairs = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            pairs.add((u, v) if u < v else (v, u))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in pairs:
            adj[u].append(v)
            adj[v].append(u)
        self._init(n, [tuple(sorted(a)) for a in adj], len(pairs))

    def _init(self, n: int, adj: list[tuple[int, ...]], m: int) -> None:
        self._n = n
        self._adj = tuple(adj)
        self._sets = tuple(frozenset(a) for a in adj)
        self._m = m
        self._cache = {}

    @classmethod
    def _from_arrays(cls, n: int, us: np.ndarray, vs: np.ndarray) -> "Graph":
        # us < vs, no duplicates
        g = cls.__new__(cls)
        src = np.concatenate([us, vs])
        dst = np.concatenate([vs, us])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        bounds = np.searchsorted(src, np.arange(n + 1))
        dl = dst.tolist()
        adj = [tuple(dl[bounds[i]:bounds[i + 1]]) for i in range(n)]
        g._init(n, adj, int(len(us)))
        return g

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, itertools.combinations(range(n), 2))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)] if n >= 3 else [])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return self._m

    def __len__(self) -> int:
        return self._n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._n == other._n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self._m})"

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self._n) for v in self._adj[u] if u < v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def neighbor_set(self, v: int) -> frozenset[int]:
        return self._sets[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self._adj), dtype=np.int64, count=self._n)

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._sets[u]

    def neighborhood(self, A: Iterable[int]) -> set[int]:
        """N(A): vertices outside ``A`` adjacent to some vertex of ``A``."""
        A = set(A)
        out: set[int] = set()
        for a in A:
            out.update(self._sets[a])
        return out - A

    def neighbors_in(self, A: Iterable[int], B: Iterable[int]) -> set[int]:
        """N(A, B) = N(A) ∩ B."""
        return self.neighborhood(A) & set(B)

    def degree_into(self, x: int, A: Iterable[int]) -> int:
        """d_G(x, A) = |N(x) ∩ A|."""
        s = self._sets[x]
        return sum(1 for a in set(A) if a in s)

    def edges_between(self, A: Iterable[int], B: Iterable[int]) -> int:
        """d_G(A, B) = sum over x in A of d_G(x, B)."""
        B = set(B)
        return sum(len(self._sets[a] & B) for a in A)

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; also returns the labels."""
        labels = sorted(set(vertices))
        index = {v: i for i, v in enumerate(labels)}
        adj = []
        m = 0
        for v in labels:
            row = tuple(sorted(index[u] for u in self._adj[v] if u in index))
            m += len(row)
            adj.append(row)
        g = Graph.__new__(Graph)
        g._init(len(labels), adj, m // 2)
        return g, labels

    def union(self, other: "Graph") -> "Graph":
        if other._n != self._n:
            raise ValueError("union of graphs on different vertex counts")
        adj = [tuple(sorted(self._sets[v] | other._sets[v])) for v in range(self._n)]
        g = Graph.__new__(Graph)
        g._init(self._n, adj, sum(len(a) for a in adj) // 2)
        return g

    def with_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        return Graph(self._n, itertools.chain(self.edges(), edges))

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self._n, self._n), dtype=bool)
        for u in range(self._n):
            a[u, list(self._adj[u])] = True
        return a

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(src, dst) arrays listing every edge in both directions."""
        arcs = self._cache.get("arcs")
        if arcs is None:
            src = np.repeat(np.arange(self._n), [len(a) for a in self._adj])
            dst = np.fromiter((u for a in self._adj for u in a), dtype=np.int64, count=2 * self._m)
            arcs = (src, dst)
            self._cache["arcs"] = arcs
        return arcs

    def degrees_into(self, members: np.ndarray) -> np.ndarray:
        """d_G(v, X) for every v, where ``members`` is a 0/1 indicator of X."""
        src, dst = self.arc_arrays()
        return np.bincount(src, weights=members[dst], minlength=self._n).astype(np.int64)

    def neighbor_masks(self) -> list[int]:
        return [sum(1 << u for u in self._adj[v]) for v in range(self._n)]

    def _mask_table(self) -> "_MaskTable":
        t = self._cache.get("masks")
        if t is None:
            t = _MaskTable(self)
            self._cache["masks"] = t
        return t


# ---------------------------------------------------------------- generation


def _check_probability(p) -> float:
    if isinstance(p, Fraction):
        p = float(p)
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """Sample G(n, p) with the documented PCG64 row-major pair stream."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p = _check_probability(p)
    if p == 0.0 or n == 1:
        return Graph(n)
    rng = make_rng(seed)
    us_parts, vs_parts = [], []
    row = 0
    while row < n - 1:
        rows = []
        count = 0
        while row < n - 1 and (count == 0 or count + (n - 1 - row) <= _BLOCK):
            rows.append(row)
            count += n - 1 - row
            row += 1
        rows_arr = np.asarray(rows, dtype=np.int64)
        lens = n - 1 - rows_arr
        draws = rng.random(count)
        hit = np.flatnonzero(draws < p)
        if hit.size == 0:
            continue
        starts = np.concatenate([[0], np.cumsum(lens)[:-1]])
        which = np.searchsorted(starts, hit, side="right") - 1
        u = rows_arr[which]
        v = u + 1 + (hit - starts[which])
        us_parts.append(u)
        vs_parts.append(v)
    if not us_parts:
        return Graph(n)
    return Graph._from_arrays(n, np.concatenate(us_parts), np.concatenate(vs_parts))


@dataclass(frozen=True)
class ExposureSchedule:
    """Per-round edge probabilities for multi-round exposure."""

    rounds: tuple[float, ...]
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(_check_probability(p) for p in self.rounds))

    def composite_probability(self) -> float:
        return 1.0 - math.prod(1.0 - p for p in self.rounds)

    def round_seed(self, i: int) -> int:
        return derive_seed(self.seed, i)


@dataclass(frozen=True)
class Exposure:
    rounds: tuple[Graph, ...]
    union: Graph


def expose(schedule: ExposureSchedule, n: int) -> Exposure:
    """Sample each round independently; round ``i`` uses ``schedule.round_seed(i)``."""
    if not schedule.rounds:
        raise ValueError("exposure schedule has no rounds")
    graphs = tuple(sample_gnp(n, p, schedule.round_seed(i)) for i, p in enumerate(schedule.rounds))
    union = graphs[0]
    for g in graphs[1:]:
        union = union.union(g)
    return Exposure(graphs, union)


# ---------------------------------------------------------------- reports


@dataclass
class PropertyReport:
    """Verdict of a property check.

    ``witness`` is a tuple of vertex tuples; ``quantity`` is the value measured
    on the witness and ``bound`` the value it had to reach.
    """

    name: str
    holds: bool
    mode: str = "exact"
    witness: tuple[tuple[int, ...], ...] | None = None
    quantity: float | None = None
    bound: float | None = None
    condition: str = ""
    trials: int = 0
    params: dict = field(default_factory=dict)
    notes: str = ""

    def __bool__(self) -> bool:
        return self.holds

    def to_text(self) -> str:
        lines = [
            f"property: {self.name}",
            f"holds: {str(self.holds).lower()}",
            f"mode: {self.mode}",
        ]
        if self.condition:
            lines.append(f"condition: {self.condition}")
        if self.witness is not None:
            lines.append("witness: " + "|".join(",".join(map(str, part)) for part in self.witness))
        if self.quantity is not None:
            lines.append(f"quantity: {self.quantity!r}")
        if self.bound is not None:
            lines.append(f"bound: {self.bound!r}")
        lines.append(f"trials: {self.trials}")
        if self.params:
            lines.append("params: " + " ".join(f"{k}={v!r}" for k, v in sorted(self.params.items())))
        if self.notes:
            lines.append(f"notes: {self.notes}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PropertyReport":
        kv = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, value = line.partition(":")
            kv[key.strip()] = value.strip()
        witness = None
        if "witness" in kv:
            witness = tuple(
                tuple(int(x) for x in part.split(",") if x) for part in kv["witness"].split("|")
            )
        params = {}
        if kv.get("params"):
            for tok in kv["params"].split(" "):
                k, _, v = tok.partition("=")
                params[k] = _parse_scalar(v)
        return cls(
            name=kv["property"],
            holds=kv["holds"] == "true",
            mode=kv.get("mode", "exact"),
            witness=witness,
            quantity=_parse_scalar(kv["quantity"]) if "quantity" in kv else None,
            bound=_parse_scalar(kv["bound"]) if "bound" in kv else None,
            condition=kv.get("condition", ""),
            trials=int(kv.get("trials", 0)),
            params=params,
            notes=kv.get("notes", ""),
        )


def _parse_scalar(s: str):
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    if s in ("True", "False"):
        return s == "True"
    return s.strip("'\"")


# ---------------------------------------------------------------- bitmask tables


def _bit_tuple(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _popcount(x: int) -> int:
    return bin(x).count("1")


class _MaskTable:
    """Per-subset data for all ``2**n`` vertex subsets (``n <= MASK_LIMIT``).

    ``union[X]`` is the OR of the neighbour masks of ``X``; ``rev[X]`` reverses
    the bit order so that, among sets of equal size, the lexicographically
    smallest sorted tuple has the largest ``rev``.
    """

    def __init__(self, g: Graph):
        n = g.n
        if n > MASK_LIMIT:
            raise ValueError("mask table limited to small graphs")
        self.n = n
        self.full = (1 << n) - 1
        size = 1 << n
        self.masks = np.arange(size, dtype=np.int64)
        self.pop = np.bitwise_count(self.masks).astype(np.int64)
        nbr = g.neighbor_masks()
        self.nbr = nbr
        union = np.zeros(size, dtype=np.int64)
        rev = np.zeros(size, dtype=np.int64)
        for i in range(n):
            lo, hi = 1 << i, 1 << (i + 1)
            union[lo:hi] = union[0:lo] | nbr[i]
            rev[lo:hi] = rev[0:lo] | (1 << (n - 1 - i))
        self.union = union
        self.rev = rev

    def lex_first(self, candidates: np.ndarray) -> int:
        """Smallest set among ``candidates``: by size, then lexicographically."""
        sizes = self.pop[candidates]
        smin = sizes.min()
        c = candidates[sizes == smin]
        return int(c[np.argmax(self.rev[c])])


def _to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


# ---------------------------------------------------------------- expansion search


def _expansion_exact_masks(g: Graph, sizes: range, factor: float, target: set[int] | None):
    """Smallest X with |X| in ``sizes`` and |N(X) ∩ target| < factor·|X|, or None."""
    t = g._mask_table()
    tmask = t.full if target is None else _to_mask(target)
    sel = (t.pop >= max(sizes.start, 1)) & (t.pop < sizes.stop)
    if not sel.any():
        return None
    cand = t.masks[sel]
    out = np.bitwise_count(t.union[cand] & ~cand & tmask).astype(np.int64)
    bad = cand[out < factor * t.pop[cand]]
    if bad.size == 0:
        return None
    x = t.lex_first(bad)
    return _bit_tuple(x)


def _nbr_count(g: Graph, X: Sequence[int], target: set[int] | None) -> int:
    N = g.neighborhood(X)
    return len(N if target is None else N & target)


def _expansion_small_exact(g: Graph, k: int, factor: float, target: set[int] | None, cap: int):
    """Exact search over |X| = k using a degree-based pruning; None if cap exceeded.

    A set X violates only if each member x has |N(x) ∩ T| - (k - 1) < factor·k.
    Returns (found, witness) where found is False when the search was skipped.
    """
    tgt = target
    cands = []
    for v in range(g.n):
        dv = len(g.neighbor_set(v) if tgt is None else g.neighbor_set(v) & tgt)
        if dv - (k - 1) < factor * k:
            cands.append(v)
    if math.comb(len(cands), k) > cap:
        return False, None
    for X in itertools.combinations(cands, k):
        if _nbr_count(g, X, tgt) < factor * k:
            return True, X
    return True, None


def _expansion_local_search(
    g: Graph, max_size: int, factor: float, target: set[int] | None, trials: int, rng: np.random.Generator
):
    """Randomized greedy growth of low-expansion sets; returns a violating X or None."""
    n = g.n
    if max_size < 1 or n == 0:
        return None
    tgt = target
    deg_t = np.array(
        [len(g.neighbor_set(v) if tgt is None else g.neighbor_set(v) & tgt) for v in range(n)], dtype=float
    )
    # bias starts towards low target-degree vertices
    weights = 1.0 / (1.0 + deg_t)
    weights /= weights.sum()
    in_t = (lambda z: True) if tgt is None else tgt.__contains__
    for _ in range(trials):
        start = int(rng.choice(n, p=weights))
        X = [start]
        Xs = {start}
        N = set(g.neighbor_set(start))
        cnt = sum(1 for z in N if in_t(z))
        for size in range(1, max_size + 1):
            if cnt < factor * size:
                return tuple(sorted(X))
            if size == max_size:
                break
            pool = list(N - Xs)
            if len(pool) > 40:
                pool = [pool[i] for i in rng.choice(len(pool), 40, replace=False)]
            extra = rng.integers(0, n, size=8).tolist()
            pool.extend(v for v in extra if v not in Xs)
            if not pool:
                break
            best, best_cnt = None, None
            for y in pool:
                # |N(X + y) - (X + y)| restricted to the target, counted incrementally
                gain = sum(1 for z in g.neighbor_set(y) if z not in N and z not in Xs and z != y and in_t(z))
                c = cnt + gain - (1 if y in N and in_t(y) else 0)
                if best_cnt is None or c < best_cnt or (c == best_cnt and rng.random() < 0.5):
                    best, best_cnt = y, c
            X.append(best)
            Xs.add(best)
            N |= g.neighbor_set(best)
            cnt = best_cnt
    return None


def find_nonexpanding_set(
    g: Graph,
    max_size: int,
    factor: float,
    target: Iterable[int] | None = None,
    *,
    exact_small: int = 3,
    trials: int = 200,
    seed: int = 0,
    cap: int = 200_000,
) -> tuple[tuple[int, ...] | None, str]:
    """Search for X with 1 <= |X| <= max_size and |N(X) ∩ target| < factor·|X|.

    Returns ``(witness or None, mode)``; ``mode`` is ``"exact"`` when the
    search was exhaustive.
    """
    tgt = None if target is None else set(target)
    if max_size < 1:
        return None, "exact"
    max_size = min(max_size, g.n)
    if g.n <= MASK_LIMIT:
        return _expansion_exact_masks(g, range(1, max_size + 1), factor, tgt), "exact"
    exhaustive = True
    for k in range(1, min(exact_small, max_size) + 1):
        done, X = _expansion_small_exact(g, k, factor, tgt, cap)
        if not done:
            exhaustive = False
            break
        if X is not None:
            return X, "exact"
    if exhaustive and max_size <= exact_small:
        return None, "exact"
    rng = make_rng(seed)
    X = _expansion_local_search(g, max_size, factor, tgt, trials, rng)
    return X, "sampled"


# ---------------------------------------------------------------- edge-free pairs


def _edge_free_pair(g: Graph, a: int, b: int, *, exact: bool, trials: int, seed: int):
    """Disjoint A (|A| = a), B (|B| = b) with no A-B edge, or None.

    In exact mode the returned A is the lexicographically first set that has
    such a partner, and B its lexicographically first partner.
    """
    n = g.n
    if a + b > n:
        return None
    if exact:
        if n <= MASK_LIMIT:
            t = g._mask_table()
            cand = t.masks[t.pop == a]
            free = t.full & ~(t.union[cand] | cand)
            ok = cand[np.bitwise_count(free) >= b]
            if ok.size == 0:
                return None
            A = t.lex_first(ok)
            freeA = t.full & ~(t.union[A] | A)
            return _bit_tuple(A), _bit_tuple(freeA)[:b]
        for A in itertools.combinations(range(n), a):
            closed = g.neighborhood(A) | set(A)
            if n - len(closed) >= b:
                rest = [v for v in range(n) if v not in closed]
                return A, tuple(rest[:b])
        return None
    rng = make_rng(seed)
    for trial in range(trials):
        if trial % 2 == 0:
            A = sorted(rng.choice(n, a, replace=False).tolist())
            closed = g.neighborhood(A) | set(A)
        else:
            start = int(rng.integers(n))
            A = [start]
            closed = set(g.neighbor_set(start)) | {start}
            while len(A) < a:
                pool = list(closed - set(A))
                if len(pool) > 30:
                    pool = [pool[i] for i in rng.choice(len(pool), 30, replace=False)]
                pool.extend(int(v) for v in rng.integers(0, n, size=6) if int(v) not in A)
                best, best_c = None, None
                for y in pool:
                    c = len(g.neighbor_set(y) - closed) + (0 if y in closed else 1)
                    if best_c is None or c < best_c:
                        best, best_c = y, c
                A.append(best)
                closed |= g.neighbor_set(best) | {best}
            A = sorted(A)
        if n - len(closed) >= b:
            rest = sorted(set(range(n)) - closed)
            return tuple(A), tuple(rest[:b])
    return None


# ---------------------------------------------------------------- checkers


def check_pairwise_edge(g: Graph, m: int, *, trials: int = 2000, seed: int = 0) -> PropertyReport:
    """Every two disjoint ``m``-sets are joined by at least one edge."""
    n = g.n
    if m < 1 or 2 * m > n:
        raise ValueError(f"need 1 <= m <= n/2, got m={m}, n={n}")
    exact = math.comb(n, m) ** 2 <= EXACT_PAIR_LIMIT or n <= MASK_LIMIT
    pair = _edge_free_pair(g, m, m, exact=exact, trials=trials, seed=seed)
    mode = "exact" if exact else "sampled"
    params = {"m": m}
    if pair is None:
        return PropertyReport("pairwise_edge", True, mode, trials=0 if exact else trials, params=params)
    return PropertyReport(
        "pairwise_edge", False, mode, witness=pair, quantity=0, bound=1,
        trials=0 if exact else trials, params=params,
    )


def check_density(
    g: Graph,
    a: int,
    b: int,
    p: float,
    *,
    out_of_regime: bool = False,
    trials: int = 2000,
    seed: int = 0,
) -> PropertyReport:
    """Every disjoint A, B with |A| = a, |B| = b span between abp/2 and 3abp/2 edges."""
    n = g.n
    if a < 1 or b < 1:
        raise ValueError("set sizes must be positive")
    if a + b > n:
        raise ValueError(f"a + b = {a + b} exceeds n = {n}")
    p = _check_probability(p)
    in_regime = a * b * p >= 32 * n
    if not in_regime and not out_of_regime:
        raise ValueError("abp < 32n: outside the regime of the bound (pass out_of_regime=True)")
    lo, hi = a * b * p / 2, 3 * a * b * p / 2
    params = {"a": a, "b": b, "p": p, "in_regime": in_regime}
    exact = math.comb(n, a) * math.comb(n - a, b) <= EXACT_PAIR_LIMIT
    adj = g.adjacency_matrix().astype(np.int64)

    def extremes(A):
        d = adj[list(A)].sum(axis=0)
        mask = np.ones(n, dtype=bool)
        mask[list(A)] = False
        outside = np.flatnonzero(mask)
        vals = d[outside]
        order = np.argsort(vals, kind="stable")
        return outside, vals, order

    def violation(A):
        outside, vals, order = extremes(A)
        low = int(vals[order[:b]].sum())
        high = int(vals[order[::-1][:b]].sum())
        if low < lo:
            return "low", outside, vals, order
        if high > hi:
            return "high", outside, vals, order
        return None

    def report_for(A, kind, outside, vals, order, mode, B=None):
        if B is None:
            idx = order[:b] if kind == "low" else order[::-1][:b]
            B = tuple(sorted(int(outside[i]) for i in idx))
        count = g.edges_between(A, B)
        return PropertyReport(
            "density", False, mode, witness=(tuple(A), B), quantity=count,
            bound=lo if kind == "low" else hi, condition=kind,
            trials=0 if mode == "exact" else trials, params=params,
        )

    if exact:
        for A in itertools.combinations(range(n), a):
            v = violation(A)
            if v is None:
                continue
            kind, outside, vals, order = v
            # lexicographically first violating partner for this A
            dA = dict(zip(outside.tolist(), vals.tolist()))
            for B in itertools.combinations(outside.tolist(), b):
                c = sum(dA[x] for x in B)
                if c < lo or c > hi:
                    return report_for(A, "low" if c < lo else "high", outside, vals, order, "exact", B=B)
        return PropertyReport("density", True, "exact", params=params)
    rng = make_rng(seed)
    degs = g.degrees()
    by_deg = np.argsort(degs, kind="stable")
    for trial in range(trials):
        if trial == 0:
            A = tuple(sorted(by_deg[:a].tolist()))
        elif trial == 1:
            A = tuple(sorted(by_deg[::-1][:a].tolist()))
        else:
            A = tuple(sorted(rng.choice(n, a, replace=False).tolist()))
        v = violation(A)
        if v is not None:
            kind, outside, vals, order = v
            return report_for(A, kind, outside, vals, order, "sampled")
    return PropertyReport("density", True, "sampled", trials=trials, params=params)


def expander_set_size(n: int, d: float) -> int:
    return math.ceil(n / (2 * d))


def check_expander(g: Graph, d: float, *, trials: int = 300, seed: int = 0) -> PropertyReport:
    """(n, d)-expander: small sets expand by ``d`` and ⌈n/2d⌉-sets see each other."""
    if d <= 0:
        raise ValueError("expansion factor must be positive")
    n = g.n
    s = expander_set_size(n, d)
    params = {"d": d, "set_size": s}
    X, mode1 = find_nonexpanding_set(g, s - 1, d, trials=trials, seed=derive_seed(seed, 1))
    if X is not None:
        return PropertyReport(
            "expander", False, mode1, witness=(X,), quantity=len(g.neighborhood(X)),
            bound=d * len(X), condition="1", trials=trials if mode1 != "exact" else 0, params=params,
        )
    exact2 = n <= MASK_LIMIT or (2 * s <= n and math.comb(n, s) ** 2 <= EXACT_PAIR_LIMIT)
    pair = None
    if 2 * s <= n:
        pair = _edge_free_pair(g, s, s, exact=exact2, trials=trials, seed=derive_seed(seed, 2))
    mode2 = "exact" if exact2 else "sampled"
    mode = "exact" if (mode1 == "exact" and mode2 == "exact") else "sampled"
    if pair is not None:
        return PropertyReport(
            "expander", False, mode2, witness=pair, quantity=0, bound=1, condition="2",
            trials=0 if exact2 else trials, params=params,
        )
    return PropertyReport("expander", True, mode, trials=0 if mode == "exact" else trials, params=params)


def check_small_set_expansion_into(
    g: Graph, A: Iterable[int], d: float, *, trials: int = 300, seed: int = 0
) -> PropertyReport:
    """Every U with |U| <= |A|/2d has |N(U, A)| >= d|U|."""
    if d <= 0:
        raise ValueError("expansion factor must be positive")
    A = set(A)
    if not A <= set(range(g.n)):
        raise ValueError("A must be a subset of V(g)")
    limit = math.floor(len(A) / (2 * d))
    params = {"d": d, "max_size": limit}
    X, mode = find_nonexpanding_set(g, limit, d, target=A, trials=trials, seed=seed)
    if X is None:
        return PropertyReport("small_set_expansion", True, mode, trials=0 if mode == "exact" else trials, params=params)
    return PropertyReport(
        "small_set_expansion", False, mode, witness=(X,), quantity=len(g.neighborhood(X) & A),
        bound=d * len(X), trials=0 if mode == "exact" else trials, params=params,
    )


def _ddr_best_b(g: Graph, A: Sequence[int], bsize: int) -> tuple[tuple[int, ...], int]:
    # For fixed A, d_G(A, B) = sum over b in B of d(b, A), so the best B is the
    # bsize vertices with the largest degree into A (ties to smaller labels).
    Aset = set(A)
    scores = [(-(len(g.neighbor_set(v) & Aset)), v) for v in range(g.n)]
    scores.sort()
    top = scores[:bsize]
    return tuple(sorted(v for _, v in top)), -sum(s for s, _ in top)


def check_ddr(
    g: Graph, d: float, D: float, r: int, *, trials: int = 300, seed: int = 0
) -> PropertyReport:
    """(d, D, r)-property: no A, B with |A| <= r, |B| <= d|A| and d_G(A, B) >= D|A|."""
    if d <= 0 or D <= 0 or r < 1:
        raise ValueError("need d > 0, D > 0, r >= 1")
    n = g.n
    params = {"d": d, "D": D, "r": r}
    rmax = min(r, n)

    def fail(A, mode, tr):
        bsize = min(n, math.floor(d * len(A)))
        B, val = _ddr_best_b(g, A, bsize)
        return PropertyReport(
            "ddr", False, mode, witness=(tuple(A), B), quantity=val, bound=D * len(A),
            trials=tr, params=params,
        )

    if n == 0:
        return PropertyReport("ddr", True, "exact", params=params)
    # d_G(A, B) <= |A|·min(Δ, |B|) <= |A|·min(Δ, ⌊d·r⌋)
    if min(g.max_degree(), math.floor(d * rmax)) < D:
        return PropertyReport("ddr", True, "certified", params=params, notes="degree bound")
    if n <= DDR_MASK_LIMIT:
        t = g._mask_table()
        sel = (t.pop >= 1) & (t.pop <= rmax)
        cand = t.masks[sel]
        counts = np.empty((cand.size, n), dtype=np.int16)
        for v in range(n):
            counts[:, v] = np.bitwise_count(cand & t.nbr[v])
        counts = -np.sort(-counts, axis=1)
        csum = np.concatenate([np.zeros((cand.size, 1), dtype=np.int32), np.cumsum(counts, axis=1, dtype=np.int32)], axis=1)
        sizes = t.pop[cand]
        bsz = np.minimum(n, np.floor(d * sizes + 1e-12).astype(np.int64))
        best = csum[np.arange(cand.size), bsz]
        bad = cand[best >= D * sizes]
        if bad.size == 0:
            return PropertyReport("ddr", True, "exact", params=params)
        return fail(_bit_tuple(t.lex_first(bad)), "exact", 0)
    # randomized refutation: grow A inside dense neighbourhoods
    rng = make_rng(seed)
    degs = g.degrees()
    for _ in range(trials):
        v = int(rng.choice(n, p=degs / degs.sum())) if degs.sum() else int(rng.integers(n))
        A = [v]
        for size in range(1, rmax + 1):
            bsize = min(n, math.floor(d * size))
            _, val = _ddr_best_b(g, A, bsize)
            if val >= D * size:
                return fail(sorted(A), "sampled", trials)
            if size == rmax:
                break
            B, _ = _ddr_best_b(g, A, min(n, math.floor(d * (size + 1))))
            Bset = set(B)
            pool = [u for u in B if u not in A] or [int(rng.integers(n))]
            pool = pool[:30]
            best = max(pool, key=lambda u: (len(g.neighbor_set(u) & Bset), rng.random()))
            if best in A:
                break
            A.append(best)
    return PropertyReport("ddr", True, "sampled", trials=trials, params=params)


def check_degree_conditions(
    g: Graph, U: Iterable[int], eta_log_n: float, max_deg: float
) -> PropertyReport:
    """Δ(g) <= max_deg and every vertex has >= eta_log_n neighbours outside U."""
    U = set(U)
    if not U <= set(range(g.n)):
        raise ValueError("U must be a subset of V(g)")
    params = {"eta_log_n": eta_log_n, "max_deg": max_deg}
    for v in range(g.n):
        if g.degree(v) > max_deg:
            return PropertyReport(
                "degree_conditions", False, witness=((v,),), quantity=g.degree(v), bound=max_deg,
                condition="max_degree", params=params,
            )
    for v in range(g.n):
        out = len(g.neighbor_set(v) - U)
        if out < eta_log_n:
            return PropertyReport(
                "degree_conditions", False, witness=((v,),), quantity=out, bound=eta_log_n,
                condition="outside_degree", params=params,
            )
    return PropertyReport("degree_conditions", True, params=params)


def mindegexp_parameters(n: int, p: float, d: float, alpha: float, beta: float) -> dict:
    """(d, D, r) for the almost-sure (d, D, r)-property of sparse G(n, p).

    ``D = alpha·d·log log n`` and ``r = min(n/d, beta·log log n / p)``; the
    union bound only controls sets with ``|A| <= beta·log log n / p``.
    """
    if alpha * math.log(alpha / (2 * math.e * beta)) < 100:
        raise ValueError("alpha·log(alpha / 2e·beta) must be at least 100")
    if d < 4:
        raise ValueError("d must be at least 4")
    llog = math.log(math.log(n))
    D = alpha * d * llog
    r = max(1, math.floor(min(n / d, beta * llog / p)))
    return {"d": d, "D": D, "r": r}


def recheck(g: Graph, report: PropertyReport) -> bool:
    """Re-evaluate a failing report's witness; True if the violation reproduces."""
    if report.holds or report.witness is None:
        return False
    w = report.witness
    prm = report.params
    if report.name == "pairwise_edge" or (report.name == "expander" and report.condition == "2"):
        A, B = w
        return not set(A) & set(B) and g.edges_between(A, B) == 0 and len(A) == len(B)
    if report.name == "expander":
        (X,) = w
        return len(g.neighborhood(X)) < prm["d"] * len(X)
    if report.name == "small_set_expansion":
        return report.quantity < report.bound and len(g.neighborhood(w[0])) >= report.quantity
    if report.name == "density":
        A, B = w
        c = g.edges_between(A, B)
        a, b, p = prm["a"], prm["b"], prm["p"]
        return not set(A) & set(B) and (c < a * b * p / 2 or c > 3 * a * b * p / 2)
    if report.name == "ddr":
        A, B = w
        return len(B) <= prm["d"] * len(A) and len(A) <= prm["r"] and g.edges_between(A, B) >= prm["D"] * len(A)
    if report.name == "degree_conditions":
        (v,) = w[0]
        if report.condition == "max_degree":
            return g.degree(v) > prm["max_deg"]
        return report.quantity < prm["eta_log_n"]
    if report.name == "bcps":
        B, C = w
        return not set(B) & set(C) and g.edges_between(B, C) == 0
    raise ValueError(f"unknown property {report.name}")


# ---------------------------------------------------------------- file format


def format_graph(g: Graph, tree: bool = False) -> str:
    edges = g.edges()
    head = f"{g.n} {len(edges)}" + (" tree" if tree else "")
    return head + "\n" + "".join(f"{u} {v}\n" for u, v in edges)


def write_graph(path, g: Graph, tree: bool = False) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_graph(g, tree=tree))


def parse_graph(text: str) -> tuple[Graph, bool]:
    """Parse the edge-list format; returns the graph and the ``tree`` header flag."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) not in (2, 3) or (len(head) == 3 and head[2] != "tree"):
        raise ValueError(f"bad header line: {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    if n < 0 or m < 0:
        raise ValueError("negative counts in header")
    if len(lines) - 1 != m:
        raise ValueError(f"header declares {m} edges, found {len(lines) - 1}")
    edges = []
    prev = None
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 2:
            raise ValueError(f"line {i}: expected 'u v'")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < v < n):
            raise ValueError(f"line {i}: need 0 <= u < v < n")
        if prev is not None and (u, v) <= prev:
            raise ValueError(f"line {i}: edges not strictly sorted")
        prev = (u, v)
        edges.append((u, v))
    return Graph(n, edges), len(head) == 3


def read_graph(path) -> Graph:
    with open(path, newline="") as fh:
        return parse_graph(fh.read())[0]
