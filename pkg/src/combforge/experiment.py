"""Seed sweeps over the pipelines, written as deterministic CSV."""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .extraction import PipelineError
from .graphs import ExposureSchedule
from .pipelines import (
    COMB_SQRT_STAGES,
    TEETH_STAGES,
    comb_sqrt_probability,
    embed_comb_sqrt,
    embed_teeth_tree,
    get_profile,
    teeth_round_probabilities,
)
from .trees import make_comb

PIPELINES = ("comb_sqrt", "teeth_tree")
FAIL_STAGES = tuple(dict.fromkeys(COMB_SQRT_STAGES + TEETH_STAGES)) + ("error",)
COLUMNS = ("seed", "n", "k", "profile", "p_effective", "success", "fail_stage", "elapsed_ms")
THREADS_ENV = "COMB_FORGE_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """One sweep: every (n, k, seed) combination of the grids.

    For ``comb_sqrt`` the k column is √n and ``k_grid`` is ignored.  For
    ``teeth_tree`` each k is a tooth length in edges and the tree is
    ``make_comb(n, k + 1)``.
    """

    pipeline: str
    n_grid: tuple[int, ...]
    k_grid: tuple[int, ...] = ()
    eps: float = 1.0
    profile: str = "desk"
    seeds: int = 20
    seed_base: int = 0
    out: str | None = None
    threads: int = 1
    timing: bool = False
    keep_artifacts: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"pipeline must be one of {PIPELINES}")
        if not self.n_grid:
            raise ConfigError("n grid is empty")
        if self.pipeline == "teeth_tree" and not self.k_grid:
            raise ConfigError("k grid is empty")
        if self.seeds < 1:
            raise ConfigError("need at least one seed")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        get_profile(self.profile)

    def tasks(self) -> list[tuple[int, int, int]]:
        out = []
        for n in self.n_grid:
            ks = (round(n**0.5),) if self.pipeline == "comb_sqrt" else self.k_grid
            for k in ks:
                for s in range(self.seed_base, self.seed_base + self.seeds):
                    out.append((n, k, s))
        return sorted(out)


def _p_effective(cfg: ExperimentConfig, n: int) -> float:
    prof = get_profile(cfg.profile)
    if cfg.pipeline == "comb_sqrt":
        p = comb_sqrt_probability(n, prof)
        rounds = (p, p, p)
    else:
        rounds = teeth_round_probabilities(n, cfg.eps, prof)
    return ExposureSchedule(rounds, 0).composite_probability()


def run_one(cfg: ExperimentConfig, n: int, k: int, seed: int) -> dict:
    t0 = time.perf_counter()
    row = {"seed": seed, "n": n, "k": k, "profile": cfg.profile, "p_effective": f"{_p_effective(cfg, n):.10g}"}
    result = None
    try:
        if cfg.pipeline == "comb_sqrt":
            result = embed_comb_sqrt(n, seed, cfg.profile)
        else:
            result = embed_teeth_tree(make_comb(n, k + 1), k, cfg.eps, seed, cfg.profile)
        row.update(success=1, fail_stage="")
    except PipelineError as exc:
        row.update(success=0, fail_stage=exc.stage if exc.stage in FAIL_STAGES else "error")
    except ValueError:
        row.update(success=0, fail_stage="error")
    row["elapsed_ms"] = str(round((time.perf_counter() - t0) * 1000)) if cfg.timing else ""
    if result is not None and cfg.keep_artifacts:
        d = Path(cfg.keep_artifacts)
        d.mkdir(parents=True, exist_ok=True)
        stem = f"{cfg.pipeline}_n{n}_k{k}_s{seed}"
        (d / f"{stem}.emb").write_text(result.embedding.to_text())
        (d / f"{stem}.trace").write_text(result.trace.to_text())
    return row


def _worker(args):
    cfg, n, k, seed = args
    return run_one(cfg, n, k, seed)


def thread_count(requested: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            return max(1, min(requested, int(cap)))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from None
    return requested


def run(cfg: ExperimentConfig) -> str:
    """Run the sweep and return the CSV text (also written to ``cfg.out``)."""
    cfg.validate()
    tasks = cfg.tasks()
    workers = thread_count(cfg.threads)
    if workers == 1:
        rows = [run_one(cfg, *t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_worker, [(cfg, *t) for t in tasks]))
    rows.sort(key=lambda r: (r["n"], r["k"], r["seed"]))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    text = buf.getvalue()
    if cfg.out:
        Path(cfg.out).write_text(text)
    return text


def success_rates(csv_text: str) -> dict[tuple[int, int], float]:
    """Success fraction per (n, k)."""
    tally: dict[tuple[int, int], list[int]] = {}
    for row in csv.DictReader(io.StringIO(csv_text)):
        key = (int(row["n"]), int(row["k"]))
        tally.setdefault(key, []).append(int(row["success"]))
    return {key: sum(v) / len(v) for key, v in sorted(tally.items())}
