import math

import pytest

from combforge.embedding import PipelineTrace, validate
from combforge.experiment import (
    ConfigError,
    ExperimentConfig,
    FAIL_STAGES,
    run,
    success_rates,
    thread_count,
)
from combforge.extraction import PipelineError
from combforge.pipelines import (
    ASYMPTOTIC,
    COMB_SQRT_STAGES,
    DESK,
    TEETH_STAGES,
    comb_sqrt_probability,
    embed_comb_sqrt,
    embed_teeth_tree,
    get_profile,
    replay,
    teeth_constants,
    teeth_round_probabilities,
)
from combforge.trees import make_comb, random_tree


# ---------------------------------------------------------------- profiles


def test_profiles():
    assert get_profile("desk") is DESK and get_profile(ASYMPTOTIC) is ASYMPTOTIC
    with pytest.raises(ValueError):
        get_profile("fast")
    n = 2500
    assert comb_sqrt_probability(n, ASYMPTOTIC) == pytest.approx(math.log(n) ** 2 / (3 * n))
    assert comb_sqrt_probability(n, DESK) == pytest.approx(DESK.boost * math.log(n) ** 2 / (3 * n))


def test_teeth_round_probabilities_are_probabilities():
    for prof in (DESK, ASYMPTOTIC):
        rounds = teeth_round_probabilities(2500, 1.0, prof)
        assert len(rounds) == 5 and all(0 < p <= 1 for p in rounds)


def test_asymptotic_teeth_constants_are_positive():
    C = teeth_constants(10**6, 40, 0.5, 10**4, "asymptotic")
    assert C["alpha"] > 0


# ---------------------------------------------------------------- comb with √n teeth


def test_comb_sqrt_embedding_and_replay():
    res = embed_comb_sqrt(400, 0)
    assert res.tree.edges() == make_comb(400, 20).edges()
    assert validate(res.graph, res.tree, res.embedding).holds
    again = replay(PipelineTrace.from_text(res.trace.to_text()))
    assert again.embedding == res.embedding
    assert again.trace.to_text() == res.trace.to_text()


def test_comb_sqrt_tiny_scale_fails_loudly():
    for seed in range(3):
        with pytest.raises(PipelineError) as info:
            embed_comb_sqrt(16, seed)
        assert info.value.stage in COMB_SQRT_STAGES
        assert info.value.trace.stages[-1]["stage"] == "failed"


def test_comb_sqrt_rejects_non_squares():
    with pytest.raises(ValueError):
        embed_comb_sqrt(15, 0)


# ---------------------------------------------------------------- teeth pipeline


def test_teeth_pipeline_small_comb_and_replay():
    T = make_comb(400, 20)
    res = embed_teeth_tree(T, 19, 1.0, 0)
    assert validate(res.graph, T, res.embedding).holds
    again = replay(PipelineTrace.from_text(res.trace.to_text()))
    assert again.embedding == res.embedding


def test_teeth_pipeline_needs_teeth():
    with pytest.raises(ValueError, match="no teeth"):
        embed_teeth_tree(random_tree(200, 3, 0), 40, 1.0, 0)


def test_teeth_replay_rejects_other_tree():
    tr = PipelineTrace("teeth_tree", {"n": 400, "k": 19, "eps": 1.0, "seed": 0, "profile": "desk", "tree": "t0"})
    with pytest.raises(ValueError, match="does not match"):
        replay(tr)


def test_teeth_failures_are_stage_tagged():
    for seed in (1, 2):
        try:
            res = embed_teeth_tree(make_comb(400, 20), 19, 1.0, seed)
        except PipelineError as exc:
            assert exc.stage in TEETH_STAGES
            continue
        assert validate(res.graph, res.tree, res.embedding).holds


# ---------------------------------------------------------------- experiment harness


def test_config_errors():
    with pytest.raises(ConfigError):
        run(ExperimentConfig("comb_sqrt", (400,), seeds=0))
    with pytest.raises(ConfigError):
        run(ExperimentConfig("comb_sqrt", ()))
    with pytest.raises(ConfigError):
        run(ExperimentConfig("teeth_tree", (400,)))
    with pytest.raises(ConfigError):
        run(ExperimentConfig("spanning", (400,)))


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("COMB_FORGE_THREADS", "2")
    assert thread_count(8) == 2
    monkeypatch.setenv("COMB_FORGE_THREADS", "x")
    with pytest.raises(ConfigError):
        thread_count(8)


def test_csv_is_sorted_and_deterministic(tmp_path):
    cfg = ExperimentConfig("comb_sqrt", (400, 100), seeds=3, seed_base=5, keep_artifacts=str(tmp_path / "a"))
    text = run(cfg)
    lines = text.splitlines()
    assert lines[0] == "seed,n,k,profile,p_effective,success,fail_stage,elapsed_ms"
    keys = [tuple(int(x) for x in (ln.split(",")[1], ln.split(",")[2], ln.split(",")[0])) for ln in lines[1:]]
    assert keys == sorted(keys) and len(keys) == 6
    for ln in lines[1:]:
        stage = ln.split(",")[6]
        assert stage == "" or stage in FAIL_STAGES
    cfg2 = ExperimentConfig("comb_sqrt", (400, 100), seeds=3, seed_base=5, threads=2)
    assert run(cfg2) == text
    rates = success_rates(text)
    assert set(rates) == {(100, 10), (400, 20)}
    emb = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(emb) == 2 * sum(int(ln.split(",")[5]) for ln in lines[1:])
