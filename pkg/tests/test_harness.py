import json
import os

import numpy as np
import pytest
from statsmodels.stats.proportion import proportion_confint

from noisyevo.algorithms import MuPlusOne, OnePlusOne
from noisyevo.estimation import Adaptive, Fixed
from noisyevo.harness import (
    ExperimentSpec,
    SweepError,
    build_sweep,
    log2_ceil,
    preset,
    run_experiment,
    run_sweep,
    specs_from_manifest,
    summarize,
    ucurve_m_star,
)
from noisyevo.noise import parse_model
from noisyevo.problems import Problem
from noisyevo.stats import wilson_interval


def small_spec(**overrides):
    base = dict(
        problem=Problem("onemax", 20),
        model=parse_model("symmetric"),
        algo=OnePlusOne(),
        policy=Fixed(1),
        budget=2000,
        trials=20,
        base_seed=5,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_wilson_against_statsmodels():
    for successes, trials in ((90, 100), (0, 100), (1, 7), (100, 100), (13, 30)):
        low, high = wilson_interval(successes, trials)
        ref_low, ref_high = proportion_confint(successes, trials, method="wilson")
        assert abs(low - ref_low) < 1e-9
        assert abs(high - ref_high) < 1e-9
    low, high = wilson_interval(90, 100)
    assert abs(low - 0.825) < 0.001 and abs(high - 0.945) < 0.001
    assert wilson_interval(0, 100)[1] == pytest.approx(0.037, abs=0.001)


def test_summarize_validation():
    _, records = run_experiment(small_spec(), jobs=1)
    with pytest.raises(ValueError):
        summarize([])
    other = run_experiment(small_spec(budget=3000), jobs=1)[1]
    with pytest.raises(ValueError):
        summarize(records + other)


def test_summarize_identical_hits():
    _, records = run_experiment(small_spec(), jobs=1)
    # force a degenerate set: replay one successful-like record three times
    from dataclasses import replace
    r = replace(records[0], success=True, evals_at_hit=41)
    s = summarize([r, r, r])
    assert s.hit_evals_median == s.hit_evals_mean == 41.0
    assert s.successes == 3 and not s.censored


def test_experiment_determinism_and_worker_invariance():
    s1, r1 = run_experiment(small_spec(), jobs=1)
    s2, r2 = run_experiment(small_spec(), jobs=2)
    assert s1 == s2 and r1 == r2


def test_budget_safety():
    spec = small_spec(budget=501, policy=Fixed(7), trials=10)
    _, records = run_experiment(spec, jobs=1)
    for r in records:
        if not r.success:
            assert spec.budget <= r.total_evals < spec.budget + 2 * 7


def test_csv_outputs_are_stable(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_experiment(small_spec(out_dir=str(out1)), jobs=2)
    run_experiment(small_spec(out_dir=str(out2)), jobs=1)
    t1 = (out1 / "trials.csv").read_bytes()
    t2 = (out2 / "trials.csv").read_bytes()
    assert t1 == t2
    header = t1.decode().splitlines()[0]
    assert header == ("experiment_id,trial,seed,n,problem,model,algorithm,"
                      "policy,budget,success,generations,evals_at_hit,total_evals")


def test_manifest_round_trip(tmp_path):
    spec = small_spec(out_dir=str(tmp_path))
    run_experiment(spec, jobs=1)
    loaded = specs_from_manifest(os.path.join(tmp_path, "manifest.json"))
    assert loaded == [spec]


def test_spec_serialization_round_trip():
    specs = [
        small_spec(),
        small_spec(policy=Adaptive.for_n(20, m_escalate=9), budget=10**4),
        small_spec(algo=MuPlusOne(mu=3, update_rule="add-delete")),
        ExperimentSpec(problem=Problem("onemax", 200), model=parse_model("segmented"),
                       algo=OnePlusOne(), policy=Adaptive.for_n(200),
                       budget=10, trials=1, base_seed=0),
    ]
    for spec in specs:
        assert ExperimentSpec.from_dict(spec.to_dict()) == spec


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(trials=0)
    with pytest.raises(ValueError):
        small_spec(problem=Problem("onemax", 100), model=parse_model("segmented", 200))
    with pytest.raises(ValueError):
        small_spec(algo=MuPlusOne(mu=2), policy=Adaptive.for_n(20))


def test_nonstandard_sampling_flag(tmp_path):
    flagged = small_spec(algo=MuPlusOne(mu=2), policy=Fixed(5))
    assert flagged.nonstandard_sampling
    assert not small_spec(policy=Fixed(5)).nonstandard_sampling
    assert not small_spec(algo=MuPlusOne(mu=2)).nonstandard_sampling
    run_sweep([flagged], jobs=1, out_dir=str(tmp_path))
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["specs"][0]["nonstandard_sampling"] is True


def test_sweep_matches_standalone_runs():
    base = small_spec()
    cells = build_sweep(base, {"policy": [Fixed(1), Fixed(2), Fixed(4)]})
    result = run_sweep(cells, jobs=2)
    assert [s.policy for s in result.summaries] == ["fixed:m=1", "fixed:m=2", "fixed:m=4"]
    for cell, summary in zip(cells, result.summaries):
        alone, _ = run_experiment(cell, jobs=1)
        assert alone == summary


def test_sweep_grid_shapes():
    base = small_spec(trials=2, budget=100)
    cells = build_sweep(base, {"n": [10, 12, 14], "policy": ["fixed:m=1", "fixed:m=2", "fixed:m=3"]})
    assert len(cells) == 9
    with pytest.raises(ValueError):
        build_sweep(base, {"n": [10], "policy": ["single"], "budget": [10]})
    with pytest.raises(ValueError):
        build_sweep(base, {})


def test_sweep_reports_invalid_cells_and_continues():
    base = ExperimentSpec(problem=Problem("onemax", 200), model=parse_model("segmented"),
                          algo=OnePlusOne(), policy=Fixed(1), budget=500, trials=3,
                          base_seed=1)
    cells = build_sweep(base, {"n": [200, 150]})  # 150 invalid for segmented
    assert any(isinstance(c, SweepError) for c in cells)
    result = run_sweep(cells, jobs=1)
    assert len(result.summaries) == 1
    assert len(result.failures) == 1
    assert "150" in result.failures[0][1]


def test_preset_definitions():
    assert ucurve_m_star(12) == 19823
    assert log2_ceil(30) == 5
    plan = preset("u-curve")
    assert [c.policy.m for c in plan.specs] == [1, 19823, 12**5]
    plan = preset("symmetric-parent")
    algos = [c.algo for c in plan.specs]
    assert MuPlusOne(mu=15) in algos and MuPlusOne(mu=2) in algos
    plan = preset("reverse-offspring")
    assert any(getattr(a, "lam", None) == 40 for a in (c.algo for c in plan.specs))
    plan = preset("segmented-adaptive")
    assert plan.specs[0].policy == Adaptive(t_low=600.0, t_high=200.0**4, m_escalate=200**2)
    with pytest.raises(ValueError):
        preset("torus")


def test_preset_runs_tiny(tmp_path):
    from noisyevo.harness import run_preset
    result = run_preset("symmetric-parent", trials=2, budget=3000,
                        base_seed=3, out_dir=str(tmp_path), jobs=2)
    assert len(result.summaries) == 5
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["preset"] == "symmetric-parent"
    assert manifest["scaling_notes"]
    assert (tmp_path / "summary.csv").exists()
