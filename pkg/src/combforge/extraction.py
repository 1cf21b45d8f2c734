"""Small-set expanding subgraphs, degree-proportional partitions and the
edge-free pair check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graphs import (
    EXACT_PAIR_LIMIT,
    MASK_LIMIT,
    Graph,
    PropertyReport,
    _edge_free_pair,
    derive_seed,
    find_nonexpanding_set,
    make_rng,
)


class ExtractionError(RuntimeError):
    def __init__(self, message: str, report: PropertyReport | None = None, removed=()):
        super().__init__(message)
        self.report = report
        self.removed = tuple(removed)


@dataclass
class Extraction:
    """Vertex set H left after peeling, plus how it was verified."""

    H: frozenset[int]
    removed: tuple[int, ...]
    mode: str
    rounds: int


def extract_expander_subgraph(
    g: Graph, m: int, d: float, *, seed: int = 0, trials: int = 300, exact_small: int = 3
) -> Extraction:
    """Peel non-expanding sets until every A ⊆ H with |A| <= m has |N_H(A)| >= d|A|.

    Each round searches the current induced subgraph for a violating set
    (exhaustive up to ``exact_small`` vertices, or fully for small graphs, then
    randomized growth) and removes it.  The final H is verified by a fresh
    search; if more than ``m`` vertices would have to go, the input did not
    satisfy the expansion hypothesis and an :class:`ExtractionError` is raised.
    """
    if m < 1 or d <= 0:
        raise ValueError("need m >= 1 and d > 0")
    H = set(range(g.n))
    removed: list[int] = []
    rounds = 0
    mode = "exact"
    while True:
        sub, labels = g.induced(H)
        X, mode = find_nonexpanding_set(
            sub, min(m, sub.n), d, exact_small=exact_small, trials=trials, seed=derive_seed(seed, rounds)
        )
        if X is None:
            break
        rounds += 1
        gone = [labels[i] for i in X]
        removed.extend(gone)
        H -= set(gone)
        if len(removed) > m:
            raise ExtractionError(
                f"peeled {len(removed)} > m={m} vertices; expansion hypothesis fails",
                removed=removed,
            )
        if not H:
            break
    return Extraction(frozenset(H), tuple(sorted(removed)), mode, rounds)


# ---------------------------------------------------------------- partitions


@dataclass
class Partition:
    A: tuple[int, ...]
    B: tuple[int, ...]
    attempts: int
    lemma_value: float
    repaired: bool = False
    violators: tuple[int, ...] = ()
    diagnostics: dict = field(default_factory=dict)


class PartitionError(RuntimeError):
    def __init__(self, message: str, best: Partition):
        super().__init__(message)
        self.best = best


def cll_inequality(max_degree: int, a: int, b: int, delta: float) -> float:
    """Left side of the success condition Δ²·⌈m/min(a,b)⌉·2·e^(1 - min(a,b)²δ/5m²)."""
    m = a + b
    lo = min(a, b)
    return max_degree**2 * math.ceil(m / lo) * 2 * math.exp(1 - lo * lo * delta / (5 * m * m))


def partition_violators(g: Graph, Y: np.ndarray, inA: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vertices failing the A-side and B-side degree conditions, plus deficits."""
    n = g.n
    yind = np.zeros(n)
    yind[Y] = 1
    aind = np.zeros(n)
    aind[Y[inA]] = 1
    dY = g.degrees_into(yind)
    dA = g.degrees_into(aind)
    dB = dY - dA
    m = len(Y)
    a = int(inA.sum())
    b = m - a
    # integer form of d(v,A) >= a·d(v,Y)/3m
    needA = 3 * m * dA < a * dY
    needB = 3 * m * dB < b * dY
    return np.flatnonzero(needA), np.flatnonzero(needB), dY


def _repair(g: Graph, Y: np.ndarray, inA: np.ndarray, rng, max_swaps: int) -> np.ndarray:
    """Local swaps of one A vertex with one B vertex that reduce the violation count."""
    pos = {int(v): i for i, v in enumerate(Y)}
    m = len(Y)
    a = int(inA.sum())
    b = m - a
    yind = np.zeros(g.n)
    yind[Y] = 1
    dY = g.degrees_into(yind)
    aind = np.zeros(g.n)
    aind[Y[inA]] = 1
    dA = g.degrees_into(aind)

    def nviol(da):
        return int(np.count_nonzero(3 * m * da < a * dY) + np.count_nonzero(3 * m * (dY - da) < b * dY))

    cur = nviol(dA)
    for _ in range(max_swaps):
        if cur == 0:
            return inA
        badA = np.flatnonzero(3 * m * dA < a * dY)
        badB = np.flatnonzero(3 * m * (dY - dA) < b * dY)
        v = int(badA[0]) if badA.size else int(badB[0])
        want_A = badA.size > 0
        # move a Y-neighbour of v to the side v lacks, swapping back a non-neighbour
        nb = [pos[u] for u in g.neighbors(v) if u in pos and bool(inA[pos[u]]) != want_A]
        others = [i for i in range(m) if bool(inA[i]) == want_A and not g.has_edge(v, int(Y[i]))]
        if not nb or not others:
            return inA
        improved = False
        for i in rng.permutation(len(nb))[:8]:
            x = int(Y[nb[i]])
            for j in rng.permutation(len(others))[:8]:
                y = int(Y[others[j]])
                # x joins A iff want_A; y leaves A iff want_A
                sign = 1 if want_A else -1
                trial = dA.copy()
                trial[list(g.neighbors(x))] += sign
                trial[list(g.neighbors(y))] -= sign
                c = nviol(trial)
                if c < cur:
                    inA[nb[i]] = not inA[nb[i]]
                    inA[others[j]] = not inA[others[j]]
                    dA, cur, improved = trial, c, True
                    break
            if improved:
                break
        if not improved:
            return inA
    return inA


def partition_degree_proportional(
    g: Graph,
    Y: Iterable[int],
    a: int,
    b: int,
    delta: float,
    seed: int = 0,
    *,
    max_attempts: int = 1000,
    repair_swaps: int = 50,
) -> Partition:
    """Split Y into A (|A| = a) and B (|B| = b) with every vertex v having
    d(v, A) >= a·d(v, Y)/3m and d(v, B) >= b·d(v, Y)/3m, m = a + b.

    Attempt i draws a uniform random split with seed ``derive_seed(seed, i)``;
    when it fails, a short run of improving swaps is tried before moving on.
    """
    Y = np.array(sorted(set(Y)), dtype=np.int64)
    if a < 1 or b < 1 or a + b != len(Y):
        raise ValueError("need positive a, b with a + b = |Y|")
    yind = np.zeros(g.n)
    yind[Y] = 1
    dY = g.degrees_into(yind)
    lemma = cll_inequality(g.max_degree(), a, b, delta)
    diag = {"min_degree_into_Y": int(dY.min()) if g.n else 0, "delta_ok": bool(dY.min() >= delta) if g.n else True}
    # a vertex with exactly one neighbour in Y needs a neighbour on both sides
    lone = tuple(np.flatnonzero(dY == 1).tolist())
    if lone:
        raise PartitionError("a vertex has a single neighbour in Y", Partition((), (), 0, lemma, False, lone, diag))
    best = None
    for i in range(max_attempts):
        rng = make_rng(derive_seed(seed, i))
        inA = np.zeros(len(Y), dtype=bool)
        inA[rng.permutation(len(Y))[:a]] = True
        badA, badB, _ = partition_violators(g, Y, inA)
        repaired = False
        if (badA.size or badB.size) and repair_swaps:
            inA = _repair(g, Y, inA, rng, repair_swaps)
            badA, badB, _ = partition_violators(g, Y, inA)
            repaired = True
        viol = tuple(sorted(set(badA.tolist()) | set(badB.tolist())))
        part = Partition(tuple(Y[inA].tolist()), tuple(Y[~inA].tolist()), i + 1, lemma, repaired, viol, diag)
        if not viol:
            return part
        if best is None or len(viol) < len(best.violators):
            best = part
    raise PartitionError(f"no valid partition after {max_attempts} attempts", best)


def check_partition(g: Graph, A: Iterable[int], B: Iterable[int]) -> tuple[int, ...]:
    """Vertices violating either degree condition for the split (A, B)."""
    A, B = list(A), list(B)
    Y = np.array(A + B, dtype=np.int64)
    inA = np.zeros(len(Y), dtype=bool)
    inA[: len(A)] = True
    badA, badB, _ = partition_violators(g, Y, inA)
    return tuple(sorted(set(badA.tolist()) | set(badB.tolist())))


# ---------------------------------------------------------------- edge-free pairs


def check_bcps(g: Graph, beta: float, gamma: float, *, trials: int = 2000, seed: int = 0) -> PropertyReport:
    """No disjoint B, C with |B| >= beta·n, |C| >= gamma·n and no B-C edge.

    Larger sets only make an edge more likely, so it suffices to test sizes
    ⌈beta·n⌉ and ⌈gamma·n⌉.
    """
    if not (0 < beta <= gamma <= 0.5):
        raise ValueError("need 0 < beta <= gamma <= 1/2")
    n = g.n
    b, c = math.ceil(beta * n), math.ceil(gamma * n)
    params = {"beta": beta, "gamma": gamma, "b": b, "c": c}
    if b + c > n:
        return PropertyReport("bcps", True, "exact", params=params, notes="sets cannot be disjoint")
    exact = n <= MASK_LIMIT or math.comb(n, b) * math.comb(n - b, c) <= EXACT_PAIR_LIMIT
    pair = _edge_free_pair(g, b, c, exact=exact, trials=trials, seed=seed)
    mode = "exact" if exact else "sampled"
    tr = 0 if exact else trials
    if pair is None:
        return PropertyReport("bcps", True, mode, trials=tr, params=params)
    return PropertyReport("bcps", False, mode, witness=pair, quantity=0, bound=1, trials=tr, params=params)


# ---------------------------------------------------------------- pipeline


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str, trace=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.trace = trace


def almost_spanning_pipeline(g: Graph, T, eps: float, seed: int = 0, *, max_degree: int | None = None,
                             anchor: tuple[int, int] | None = None):
    """Embed a bounded-degree tree with at most (1 - eps)·n vertices.

    Peels a set of at most m = ⌈eps·n/10Δ⌉ vertices so that small sets expand
    by 2Δ in the rest, then embeds T there with
    :func:`combforge.embedding.embed_tree_in_expander`.
    """
    from .embedding import EmbeddingError, embed_tree_in_expander, validate

    n = g.n
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if T.n > (1 - eps) * n:
        raise ValueError(f"tree has {T.n} > (1 - eps)·n = {(1 - eps) * n:.1f} vertices")
    delta = max_degree or max(1, T.max_degree())
    m = math.ceil(eps * n / (10 * delta))
    try:
        ext = extract_expander_subgraph(g, m, 2 * delta, seed=seed)
    except ExtractionError as exc:
        raise PipelineError("extract", str(exc)) from exc
    H = ext.H
    if len(H) < T.n:
        raise PipelineError("extract", "too few vertices left after peeling")
    if anchor is None:
        t0 = 0
        v0 = min(H, key=lambda v: (-sum(1 for u in g.neighbors(v) if u in H), v))
    else:
        t0, v0 = anchor
        if v0 not in H:
            raise PipelineError("extract", f"anchor vertex {v0} was peeled")
    try:
        emb = embed_tree_in_expander(g, T, v0, t0, seed=derive_seed(seed, 1), allowed=H)
    except EmbeddingError as exc:
        raise PipelineError("embed", str(exc)) from exc
    rep = validate(g, T, emb)
    if not rep.holds:
        raise AssertionError(f"pipeline produced an invalid embedding: {rep.to_text()}")
    return emb
