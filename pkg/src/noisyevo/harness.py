"""Trial orchestration: seeded experiments, sweeps, presets, persistent outputs.

Per-trial streams are derived from (base_seed, trial index), so results are
identical no matter how many workers run the trials, and the per-trial CSV
is byte-identical across reruns of the same spec.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .algorithms import (
    AlgoConfig,
    MuPlusOne,
    OnePlusLambda,
    OnePlusOne,
    TrialResult,
    algo_name,
    parse_algo,
    run_trial,
)
from .estimation import Adaptive, Fixed, SamplePolicy, parse_policy, policy_name
from .noise import NoiseModel, model_name, parse_model, validate_model
from .problems import LEADINGONES, ONEMAX, Problem
from .stats import wilson_interval
from .streams import purpose_code

TRIAL_CSV_COLUMNS = [
    "experiment_id", "trial", "seed", "n", "problem", "model", "algorithm",
    "policy", "budget", "success", "generations", "evals_at_hit", "total_evals",
]

SUMMARY_CSV_COLUMNS = [
    "experiment_id", "n", "problem", "model", "algorithm", "policy", "budget",
    "trials", "successes", "success_rate", "wilson_low", "wilson_high",
    "hit_evals_mean", "hit_evals_median", "hit_evals_q25", "hit_evals_q75",
    "censored",
]


@dataclass(frozen=True)
class ExperimentSpec:
    problem: Problem
    model: NoiseModel
    algo: AlgoConfig
    policy: SamplePolicy
    budget: int
    trials: int
    base_seed: int
    out_dir: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        validate_model(self.model, self.problem)
        if isinstance(self.policy, Adaptive) and not isinstance(self.algo, OnePlusOne):
            raise ValueError("adaptive sampling pairs only with the (1+1)-EA")

    @property
    def experiment_id(self) -> str:
        return "_".join([
            self.problem.kind, f"n{self.problem.n}", model_name(self.model),
            algo_name(self.algo), policy_name(self.policy), f"b{self.budget}",
        ])

    @property
    def nonstandard_sampling(self) -> bool:
        # sampling is standard only with the (1+1)-EA; other pairings get flagged
        return isinstance(self.policy, Fixed) and self.policy.m > 1 and not isinstance(
            self.algo, OnePlusOne
        )

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.kind,
            "n": self.problem.n,
            "model": model_name(self.model),
            "algorithm": algo_name(self.algo),
            "policy": policy_name(self.policy),
            "budget": self.budget,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        problem = Problem(d["problem"], int(d["n"]))
        return cls(
            problem=problem,
            model=parse_model(d["model"], problem.n),
            algo=parse_algo(d["algorithm"]),
            policy=parse_policy(d["policy"], problem.n),
            budget=int(d["budget"]),
            trials=int(d["trials"]),
            base_seed=int(d["base_seed"]),
            out_dir=d.get("out_dir"),
        )


@dataclass(frozen=True)
class TrialRecord:
    """One row of the per-trial CSV: config echo plus the trial outcome."""

    experiment_id: str
    trial: int
    seed: int
    n: int
    problem: str
    model: str
    algorithm: str
    policy: str
    budget: int
    success: bool
    generations: int
    evals_at_hit: int | None
    total_evals: int

    def config_key(self) -> tuple:
        return (self.experiment_id, self.n, self.problem, self.model,
                self.algorithm, self.policy, self.budget)


@dataclass(frozen=True)
class SummaryRow:
    experiment_id: str
    n: int
    problem: str
    model: str
    algorithm: str
    policy: str
    budget: int
    trials: int
    successes: int
    success_rate: float
    wilson_low: float
    wilson_high: float
    hit_evals_mean: float | None
    hit_evals_median: float | None
    hit_evals_q25: float | None
    hit_evals_q75: float | None
    censored: bool


def trial_seed(base_seed: int, trial: int) -> int:
    """64-bit per-trial seed; recreating a Generator from it replays the trial."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(trial, purpose_code("trial")))
    return int(ss.generate_state(1, np.uint64)[0])


def summarize(records: list[TrialRecord]) -> SummaryRow:
    """Aggregate homogeneous per-trial records into one summary row.

    Hit statistics are computed over successes only; censored marks that
    budget-limited trials were excluded from them.
    """
    if not records:
        raise ValueError("cannot summarize an empty record set")
    keys = {r.config_key() for r in records}
    if len(keys) != 1:
        raise ValueError(f"mixed configs in one summary: {sorted(keys)}")
    r0 = records[0]
    successes = sum(1 for r in records if r.success)
    low, high = wilson_interval(successes, len(records))
    hits = np.array([r.evals_at_hit for r in records if r.success], dtype=np.float64)
    stats = {}
    for name, q in (("mean", None), ("median", 0.5), ("q25", 0.25), ("q75", 0.75)):
        if hits.size == 0:
            stats[name] = None
        elif q is None:
            stats[name] = float(hits.mean())
        else:
            stats[name] = float(np.quantile(hits, q))
    return SummaryRow(
        experiment_id=r0.experiment_id, n=r0.n, problem=r0.problem, model=r0.model,
        algorithm=r0.algorithm, policy=r0.policy, budget=r0.budget,
        trials=len(records), successes=successes,
        success_rate=successes / len(records), wilson_low=low, wilson_high=high,
        hit_evals_mean=stats["mean"], hit_evals_median=stats["median"],
        hit_evals_q25=stats["q25"], hit_evals_q75=stats["q75"],
        censored=successes < len(records),
    )


def _run_one(spec: ExperimentSpec, t: int) -> TrialRecord:
    seed = trial_seed(spec.base_seed, t)
    result: TrialResult = run_trial(
        spec.problem, spec.model, spec.algo, spec.policy, spec.budget, seed
    )
    return TrialRecord(
        experiment_id=spec.experiment_id, trial=t, seed=seed, n=spec.problem.n,
        problem=spec.problem.kind, model=model_name(spec.model),
        algorithm=algo_name(spec.algo), policy=policy_name(spec.policy),
        budget=spec.budget, success=result.success, generations=result.generations,
        evals_at_hit=result.evals_at_hit, total_evals=result.total_evals,
    )


def run_experiment(
    spec: ExperimentSpec, jobs: int | None = None
) -> tuple[SummaryRow, list[TrialRecord]]:
    """Execute all trials of one spec; write CSVs and manifest if out_dir set."""
    records = _execute(spec, jobs)
    summary = summarize(records)
    if spec.out_dir:
        t0 = time.time()
        write_outputs(spec.out_dir, [spec], [summary], records,
                      wallclock=time.time() - t0)
    return summary, records


def _execute(spec: ExperimentSpec, jobs: int | None) -> list[TrialRecord]:
    workers = jobs or min(os.cpu_count() or 1, spec.trials)
    if workers <= 1:
        return [_run_one(spec, t) for t in range(spec.trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: _run_one(spec, t), range(spec.trials)))


@dataclass(frozen=True)
class SweepError:
    """An invalid sweep cell, carried so the remaining cells still run."""

    description: str
    message: str


@dataclass
class SweepResult:
    summaries: list[SummaryRow]
    records: list[TrialRecord]
    failures: list[tuple[str, str]]  # (cell description, error)


def run_sweep(
    specs: list,
    jobs: int | None = None,
    out_dir: str | None = None,
    preset_id: str | None = None,
    notes: list[str] | None = None,
) -> SweepResult:
    """Run every cell of a sweep; invalid cells are reported, the rest run."""
    if not specs:
        raise ValueError("empty sweep")
    t0 = time.time()
    summaries: list[SummaryRow] = []
    all_records: list[TrialRecord] = []
    failures: list[tuple[str, str]] = []
    valid: list[ExperimentSpec] = []
    for spec in specs:
        if isinstance(spec, SweepError):
            failures.append((spec.description, spec.message))
            continue
        try:
            records = _execute(spec, jobs)
            summaries.append(summarize(records))
            all_records.extend(records)
            valid.append(spec)
        except ValueError as exc:
            failures.append((spec.experiment_id, str(exc)))
    if out_dir:
        write_outputs(out_dir, valid, summaries, all_records,
                      wallclock=time.time() - t0, preset_id=preset_id,
                      notes=notes, failures=failures)
    return SweepResult(summaries=summaries, records=all_records, failures=failures)


def build_sweep(base: ExperimentSpec, grid: dict[str, list]) -> list:
    """Cartesian product over one or two spec fields.

    Grid keys: policy, algo, model, n, budget. Values are config strings or
    already-constructed objects. Cells whose combination is invalid become
    SweepError entries instead of aborting the whole sweep.
    """
    if not grid:
        raise ValueError("empty sweep grid")
    if len(grid) > 2:
        raise ValueError("sweeps cover at most two spec fields")
    cells: list = [base]
    for field, values in grid.items():
        if not values:
            raise ValueError(f"empty grid for field {field!r}")
        expanded = []
        for cell in cells:
            if isinstance(cell, SweepError):
                expanded.append(cell)
                continue
            for v in values:
                try:
                    expanded.append(_with_field(cell, field, v))
                except ValueError as exc:
                    expanded.append(SweepError(f"{field}={v}", str(exc)))
        cells = expanded
    return cells


def _with_field(spec: ExperimentSpec, field: str, value) -> ExperimentSpec:
    n = spec.problem.n
    if field == "policy":
        policy = value if not isinstance(value, str) else parse_policy(value, n)
        return replace(spec, policy=policy)
    if field == "algo":
        algo = value if not isinstance(value, str) else parse_algo(value)
        return replace(spec, algo=algo)
    if field == "model":
        model = value if not isinstance(value, str) else parse_model(value, n)
        return replace(spec, model=model)
    if field == "n":
        return replace(spec, problem=Problem(spec.problem.kind, int(value)))
    if field == "budget":
        return replace(spec, budget=int(value))
    raise ValueError(f"unknown sweep field: {field!r}")


def write_outputs(
    out_dir: str,
    specs: list[ExperimentSpec],
    summaries: list[SummaryRow],
    records: list[TrialRecord],
    wallclock: float,
    preset_id: str | None = None,
    notes: list[str] | None = None,
    failures: list[tuple[str, str]] | None = None,
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "trials.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRIAL_CSV_COLUMNS)
        for r in records:
            w.writerow([
                r.experiment_id, r.trial, r.seed, r.n, r.problem, r.model,
                r.algorithm, r.policy, r.budget, int(r.success), r.generations,
                "" if r.evals_at_hit is None else r.evals_at_hit, r.total_evals,
            ])
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_CSV_COLUMNS)
        for s in summaries:
            w.writerow([
                s.experiment_id, s.n, s.problem, s.model, s.algorithm, s.policy,
                s.budget, s.trials, s.successes,
                f"{s.success_rate:.6f}", f"{s.wilson_low:.6f}", f"{s.wilson_high:.6f}",
                *("" if v is None else f"{v:.1f}" for v in (
                    s.hit_evals_mean, s.hit_evals_median,
                    s.hit_evals_q25, s.hit_evals_q75)),
                int(s.censored),
            ])
    manifest = {
        "tool": "noisy-evo",
        "version": __version__,
        "preset": preset_id,
        "scaling_notes": notes or [],
        "specs": [
            dict(s.to_dict(), nonstandard_sampling=s.nonstandard_sampling)
            for s in specs
        ],
        "failures": failures or [],
        "wallclock_seconds": round(wallclock, 3),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def specs_from_manifest(path: str) -> list[ExperimentSpec]:
    with open(path) as fh:
        manifest = json.load(fh)
    return [ExperimentSpec.from_dict(d) for d in manifest["specs"]]


# ---------------------------------------------------------------------------
# presets: the four canned experiment groups at desk scale


def log2_ceil(n: int) -> int:
    """Population-size logarithm: base 2, rounded up (recorded in manifests)."""
    return math.ceil(math.log2(n))


def ucurve_m_star(n: int) -> int:
    """The effective sample size 4 n^4 log2(n) / 15, rounded."""
    return round(4 * n**4 * math.log2(n) / 15)


PRESET_IDS = ("u-curve", "symmetric-parent", "reverse-offspring", "segmented-adaptive")

# budgets frozen after pilot runs; see the preset notes and the acceptance suite
UCURVE_DEFAULTS = {"n": 12, "trials": 100, "budget": 15_000_000}
PARENT_DEFAULTS = {"n": 30, "trials": 100, "budget": 2_000_000}
OFFSPRING_DEFAULTS = {"n": 30, "trials": 100, "budget": 1_000_000}
ADAPTIVE_DEFAULTS = {"n": 200, "trials": 30, "budget": 200_000_000}


@dataclass(frozen=True)
class PresetPlan:
    preset_id: str
    specs: list[ExperimentSpec]
    notes: list[str]


def preset(
    preset_id: str,
    n: int | None = None,
    trials: int | None = None,
    budget: int | None = None,
    base_seed: int = 0,
    out_dir: str | None = None,
) -> PresetPlan:
    """Fully parameterized scaled-down experiment groups."""
    if preset_id not in PRESET_IDS:
        raise ValueError(f"unknown preset: {preset_id!r} (choose from {PRESET_IDS})")
    if preset_id == "u-curve":
        n = n or UCURVE_DEFAULTS["n"]
        trials = trials or UCURVE_DEFAULTS["trials"]
        budget = budget or UCURVE_DEFAULTS["budget"]
        m_star = ucurve_m_star(n)
        base = ExperimentSpec(
            problem=Problem(LEADINGONES, n), model=parse_model("onebit:p=1"),
            algo=OnePlusOne(), policy=Fixed(1), budget=budget, trials=trials,
            base_seed=base_seed, out_dir=out_dir,
        )
        cells = build_sweep(base, {"policy": [Fixed(1), Fixed(m_star), Fixed(n**5)]})
        notes = [
            f"sample-size grid {{1, round(4 n^4 log2 n / 15) = {m_star}, n^5 = {n**5}}}",
            f"budget frozen at {budget} per trial after pilots: m* always hits below "
            "1e7 while m=n^5 needs a median of ~3.5e7, making the right arm of the U "
            "robust; the m=1 arm hits in ~4e3 evaluations at n=12, so no budget on this "
            "problem size separates it from m*",
        ]
        return PresetPlan(preset_id, cells, notes)
    if preset_id == "symmetric-parent":
        n = n or PARENT_DEFAULTS["n"]
        trials = trials or PARENT_DEFAULTS["trials"]
        budget = budget or PARENT_DEFAULTS["budget"]
        mu = 3 * log2_ceil(n)
        base = ExperimentSpec(
            problem=Problem(ONEMAX, n), model=parse_model("symmetric"),
            algo=OnePlusOne(), policy=Fixed(1), budget=budget, trials=trials,
            base_seed=base_seed, out_dir=out_dir,
        )
        cells = build_sweep(base, {"policy": [Fixed(1), Fixed(10), Fixed(100)]})
        cells += [
            replace(base, algo=MuPlusOne(mu=mu), policy=Fixed(1)),
            replace(base, algo=MuPlusOne(mu=2), policy=Fixed(1)),
        ]
        notes = [
            f"population logarithm taken base 2 with ceiling: mu = 3*ceil(log2 {n}) = {mu}",
            "contrast group: (1+1)-EA with m in {1,10,100} and (mu+1)-EA with mu=2",
            f"budget frozen at {budget} per trial after pilots: mu={mu} hits around "
            "8e3 evaluations while the mu=2 arm reaches 0.37 success at 1e7, so the "
            "smaller budget keeps it under its 0.2 ceiling with margin",
        ]
        return PresetPlan(preset_id, cells, notes)
    if preset_id == "reverse-offspring":
        n = n or OFFSPRING_DEFAULTS["n"]
        trials = trials or OFFSPRING_DEFAULTS["trials"]
        budget = budget or OFFSPRING_DEFAULTS["budget"]
        lam = 8 * log2_ceil(n)
        base = ExperimentSpec(
            problem=Problem(ONEMAX, n), model=parse_model("reverse"),
            algo=OnePlusOne(), policy=Fixed(1), budget=budget, trials=trials,
            base_seed=base_seed, out_dir=out_dir,
        )
        cells = build_sweep(base, {"policy": [Fixed(1), Fixed(10), Fixed(100)]})
        cells += [
            replace(base, algo=OnePlusLambda(lam=lam), policy=Fixed(1)),
            replace(base, algo=OnePlusLambda(lam=2), policy=Fixed(1)),
        ]
        notes = [
            f"population logarithm taken base 2 with ceiling: lambda = 8*ceil(log2 {n}) = {lam}",
            "contrast group: (1+1)-EA with m in {1,10,100} and (1+lambda)-EA with lambda=2",
            f"budget frozen at {budget} per trial after pilots: lambda={lam} hits around "
            "6e2 evaluations while the lambda=2 arm reaches 0.60 success at 1e7, so the "
            "smaller budget keeps it under its 0.2 ceiling with margin",
        ]
        return PresetPlan(preset_id, cells, notes)
    # segmented-adaptive
    n = n or ADAPTIVE_DEFAULTS["n"]
    trials = trials or ADAPTIVE_DEFAULTS["trials"]
    budget = budget or ADAPTIVE_DEFAULTS["budget"]
    if n % 200 != 0:
        raise ValueError(f"segmented noise requires n divisible by 200, got n={n}")
    base = ExperimentSpec(
        problem=Problem(ONEMAX, n), model=parse_model("segmented"),
        algo=OnePlusOne(), policy=Adaptive.for_n(n, m_escalate=n**2),
        budget=budget, trials=trials, base_seed=base_seed, out_dir=out_dir,
    )
    cells = [
        base,
        replace(base, policy=Fixed(1)),
        replace(base, policy=Fixed(100)),
        replace(base, algo=MuPlusOne(mu=8), policy=Fixed(1)),
        replace(base, algo=OnePlusLambda(lam=8), policy=Fixed(1)),
    ]
    notes = [
        f"comparator thresholds at canonical values t_low=3n={3*n}, t_high=n^4={n**4}",
        f"escalation sample size scaled from n^5 to n^2 = {n**2} for desk feasibility",
        "fixed-m baselines {1, 100}; population baselines mu=8 and lambda=8",
        "pilots: at n=200 every baseline hits within ~2e6 evaluations (the noise "
        "segments are at most two states wide at this size) while adaptive needs "
        "3.4e8..1.5e9, so the stated margin cannot materialize at this scale",
    ]
    return PresetPlan("segmented-adaptive", cells, notes)


def run_preset(
    preset_id: str,
    n: int | None = None,
    trials: int | None = None,
    budget: int | None = None,
    base_seed: int = 0,
    out_dir: str | None = None,
    jobs: int | None = None,
) -> SweepResult:
    plan = preset(preset_id, n=n, trials=trials, budget=budget,
                  base_seed=base_seed, out_dir=out_dir)
    return run_sweep(plan.specs, jobs=jobs, out_dir=out_dir,
                     preset_id=plan.preset_id, notes=plan.notes)
