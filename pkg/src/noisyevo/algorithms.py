"""The three elitist EAs with reevaluation-per-iteration semantics.

Every generation evaluates the offspring and reevaluates the parent(s) with
fresh noise; nothing is cached across iterations. The running-time unit is
noisy evaluations. True-optimum detection inspects every solution when it
is generated (initial solutions after their initial estimation, offspring
before any evaluation) and consumes no evaluations.

Exact accounting, with T completed generations:

* (1+1)-EA with Fixed(m): m * (1 + 2T)
* (mu+1)-EA with Single:  mu + (mu+1) * T
* (1+lambda)-EA, Single:  1 + (1+lambda) * T
* (1+1)-EA with Adaptive: 2T + 2 * m_escalate * (escalated comparisons)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .estimation import Adaptive, SamplePolicy, Single, sample_size
from .noise import NoiseModel, validate_model
from .problems import ONEMAX, Problem

RULE_REPLACE = "replace"
RULE_ADD_DELETE = "add-delete"


@dataclass(frozen=True)
class OnePlusOne:
    pass


@dataclass(frozen=True)
class MuPlusOne:
    mu: int
    update_rule: str = RULE_REPLACE

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError(f"mu must be >= 1, got {self.mu}")
        if self.update_rule not in (RULE_REPLACE, RULE_ADD_DELETE):
            raise ValueError(f"unknown update rule: {self.update_rule!r}")


@dataclass(frozen=True)
class OnePlusLambda:
    lam: int

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError(f"lambda must be >= 1, got {self.lam}")


AlgoConfig = OnePlusOne | MuPlusOne | OnePlusLambda


def parse_algo(text: str) -> AlgoConfig:
    """Parse 1+1 | mu+1:mu=<int>[,rule=replace|add-delete] | 1+lambda:lambda=<int>."""
    text = text.strip().lower()
    if text == "1+1":
        return OnePlusOne()
    head, _, rest = text.partition(":")
    opts: dict[str, str] = {}
    if rest:
        for part in rest.split(","):
            key, _, val = part.partition("=")
            opts[key.strip()] = val.strip()
    if head == "mu+1":
        if "mu" not in opts:
            raise ValueError(f"mu+1 needs mu=<int>, got {text!r}")
        return MuPlusOne(mu=int(opts["mu"]), update_rule=opts.get("rule", RULE_REPLACE))
    if head == "1+lambda":
        if "lambda" not in opts:
            raise ValueError(f"1+lambda needs lambda=<int>, got {text!r}")
        return OnePlusLambda(lam=int(opts["lambda"]))
    raise ValueError(f"unknown algorithm: {text!r}")


def algo_name(algo: AlgoConfig) -> str:
    if isinstance(algo, OnePlusOne):
        return "1+1"
    if isinstance(algo, MuPlusOne):
        return f"mu+1:mu={algo.mu},rule={algo.update_rule}"
    return f"1+lambda:lambda={algo.lam}"


@dataclass(frozen=True)
class TrialResult:
    success: bool
    generations: int
    evals_at_hit: int | None
    total_evals: int
    seed: int | None = None


def _as_rng(rng) -> tuple[np.random.Generator, int | None]:
    if isinstance(rng, np.random.Generator):
        return rng, None
    seed = int(rng)
    return np.random.default_rng(seed), seed


def _wrap(raw, seed) -> TrialResult:
    success, gens, at_hit, total = raw
    return TrialResult(
        success=bool(success),
        generations=int(gens),
        evals_at_hit=int(at_hit) if at_hit >= 0 else None,
        total_evals=int(total),
        seed=seed,
    )


def _check(problem: Problem, model: NoiseModel, budget: int) -> None:
    validate_model(model, problem)
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")


def _pcode(problem: Problem) -> int:
    return _engine.PROB_ONEMAX if problem.kind == ONEMAX else _engine.PROB_LEADINGONES


_NO_TRACE = np.empty(0, dtype=np.int64)


def run_one_plus_one(
    problem: Problem,
    model: NoiseModel,
    policy: SamplePolicy,
    budget: int,
    rng,
    trace: np.ndarray | None = None,
) -> TrialResult:
    """One (1+1)-EA trial. rng is a Generator or a seed.

    trace, when given, receives the true fitness of the current solution
    after each completed generation (up to its length).
    """
    _check(problem, model, budget)
    gen, seed = _as_rng(rng)
    t = trace if trace is not None else _NO_TRACE
    if isinstance(policy, Adaptive):
        raw = _engine.one_plus_one_adaptive(
            problem.n, _pcode(problem), model.code, model.p,
            float(policy.t_low), float(policy.t_high), policy.m_escalate,
            np.int64(budget), gen, t,
        )
    else:
        raw = _engine.one_plus_one_fixed(
            problem.n, _pcode(problem), model.code, model.p,
            sample_size(policy), np.int64(budget), gen, t,
        )
    return _wrap(raw, seed)


def run_mu_plus_one(
    problem: Problem,
    model: NoiseModel,
    mu: int,
    update_rule: str,
    budget: int,
    rng,
    policy: SamplePolicy = Single(),
    trace: np.ndarray | None = None,
) -> TrialResult:
    """One (mu+1)-EA trial; Fixed(m) scales every evaluation to m draws."""
    algo = MuPlusOne(mu=mu, update_rule=update_rule)
    _check(problem, model, budget)
    if isinstance(policy, Adaptive):
        raise ValueError("adaptive sampling pairs only with the (1+1)-EA")
    gen, seed = _as_rng(rng)
    t = trace if trace is not None else _NO_TRACE
    rule = _engine.RULE_REPLACE if algo.update_rule == RULE_REPLACE else _engine.RULE_ADD_DELETE
    raw = _engine.mu_plus_one_fixed(
        problem.n, algo.mu, rule, _pcode(problem), model.code, model.p,
        sample_size(policy), np.int64(budget), gen, t,
    )
    return _wrap(raw, seed)


def run_one_plus_lambda(
    problem: Problem,
    model: NoiseModel,
    lam: int,
    budget: int,
    rng,
    policy: SamplePolicy = Single(),
    trace: np.ndarray | None = None,
) -> TrialResult:
    """One (1+lambda)-EA trial; Fixed(m) scales every evaluation to m draws."""
    algo = OnePlusLambda(lam=lam)
    _check(problem, model, budget)
    if isinstance(policy, Adaptive):
        raise ValueError("adaptive sampling pairs only with the (1+1)-EA")
    gen, seed = _as_rng(rng)
    t = trace if trace is not None else _NO_TRACE
    raw = _engine.one_plus_lambda_fixed(
        problem.n, algo.lam, _pcode(problem), model.code, model.p,
        sample_size(policy), np.int64(budget), gen, t,
    )
    return _wrap(raw, seed)


def run_trial(
    problem: Problem,
    model: NoiseModel,
    algo: AlgoConfig,
    policy: SamplePolicy,
    budget: int,
    rng,
    trace: np.ndarray | None = None,
) -> TrialResult:
    """Dispatch one trial for any algorithm/policy combination."""
    if isinstance(algo, OnePlusOne):
        return run_one_plus_one(problem, model, policy, budget, rng, trace)
    if isinstance(algo, MuPlusOne):
        return run_mu_plus_one(
            problem, model, algo.mu, algo.update_rule, budget, rng, policy, trace
        )
    return run_one_plus_lambda(problem, model, algo.lam, budget, rng, policy, trace)
