"""Fitness estimation policies and the adaptive two-threshold comparator.

Three policies:

* Single: one noisy evaluation (sampling not used)
* Fixed(m): the mean of m independent noisy evaluations
* Adaptive(t_low, t_high, m_escalate): comparison-based. Both solutions are
  probed once; if the observed gap lies in [t_low, t_high) that ordering is
  used directly, otherwise each solution is evaluated m_escalate further
  times and the fresh means decide (probe draws excluded from the means).

Defaults for Adaptive at problem size n are t_low = 3n, t_high = n^4 and
m_escalate = n^5; all three are configurable so scaled-down experiments can
keep the mechanism while shrinking the escalation cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .bitstrings import Bitstring
from .noise import EvalCounter, NoiseModel, SegmentedNoise, noise_spectrum, validate_model
from .problems import ONEMAX, Problem
from .stats import wilson_interval


@dataclass(frozen=True)
class Single:
    name = "single"


@dataclass(frozen=True)
class Fixed:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"sample size must be >= 1, got {self.m}")


@dataclass(frozen=True)
class Adaptive:
    t_low: float
    t_high: float
    m_escalate: int

    def __post_init__(self):
        if not 0 < self.t_low < self.t_high:
            raise ValueError(
                f"need 0 < t_low < t_high, got {self.t_low}, {self.t_high}"
            )
        if self.m_escalate < 1:
            raise ValueError(f"m_escalate must be >= 1, got {self.m_escalate}")

    @classmethod
    def for_n(cls, n: int, m_escalate: int | None = None) -> "Adaptive":
        """Canonical thresholds 3n / n^4 / n^5, with an optional m_escalate override."""
        return cls(
            t_low=3.0 * n,
            t_high=float(n) ** 4,
            m_escalate=n**5 if m_escalate is None else m_escalate,
        )


SamplePolicy = Single | Fixed | Adaptive


def sample_size(policy: SamplePolicy) -> int:
    if isinstance(policy, Adaptive):
        raise ValueError("adaptive sampling is comparison-based and has no fixed size")
    return 1 if isinstance(policy, Single) else policy.m


def parse_policy(text: str, n: int | None = None) -> SamplePolicy:
    """Parse single | fixed:m=<int> | adaptive[:tlow=..,thigh=..,mesc=..]."""
    text = text.strip().lower()
    if text == "single":
        return Single()
    if text.startswith("fixed"):
        _, _, rest = text.partition(":")
        key, _, val = rest.partition("=")
        if key != "m" or not val:
            raise ValueError(f"fixed policy needs m=<int>, got {text!r}")
        return Fixed(m=int(val))
    if text.startswith("adaptive"):
        opts: dict[str, str] = {}
        _, _, rest = text.partition(":")
        if rest:
            for part in rest.split(","):
                key, _, val = part.partition("=")
                opts[key.strip()] = val.strip()
        unknown = set(opts) - {"tlow", "thigh", "mesc"}
        if unknown:
            raise ValueError(f"unknown adaptive options: {sorted(unknown)}")
        if {"tlow", "thigh", "mesc"} <= set(opts):
            return Adaptive(float(opts["tlow"]), float(opts["thigh"]), int(opts["mesc"]))
        if n is None:
            raise ValueError("adaptive policy defaults require the problem size n")
        base = Adaptive.for_n(n)
        return Adaptive(
            t_low=float(opts.get("tlow", base.t_low)),
            t_high=float(opts.get("thigh", base.t_high)),
            m_escalate=int(opts.get("mesc", base.m_escalate)),
        )
    raise ValueError(f"unknown sampling policy: {text!r}")


def policy_name(policy: SamplePolicy) -> str:
    if isinstance(policy, Single):
        return "single"
    if isinstance(policy, Fixed):
        return f"fixed:m={policy.m}"
    return f"adaptive:tlow={policy.t_low:g},thigh={policy.t_high:g},mesc={policy.m_escalate}"


def _summaries(problem: Problem, x: Bitstring):
    from .noise import _solution_summaries

    if x.shape[0] != problem.n:
        raise ValueError(f"solution length {x.shape[0]} != problem size {problem.n}")
    return _solution_summaries(x)


def _pcode(problem: Problem) -> int:
    return _engine.PROB_ONEMAX if problem.kind == ONEMAX else _engine.PROB_LEADINGONES


def estimate(
    policy: SamplePolicy,
    problem: Problem,
    model: NoiseModel,
    x: Bitstring,
    rng: np.random.Generator,
    counter: EvalCounter,
) -> float:
    """Mean of m independent noisy evaluations; advances the counter by m."""
    m = sample_size(policy)
    validate_model(model, problem)
    zeros, lo, lo_tail = _summaries(problem, x)
    value = _engine.estimate_mean(
        _pcode(problem), model.code, model.p, problem.n, zeros, lo, lo_tail, m, rng
    )
    counter.add(m)
    return float(value)


@dataclass(frozen=True)
class ComparisonOutcome:
    offspring_not_worse: bool
    evals_consumed: int
    route: str  # direct | escalated | averaged


def adaptive_compare(
    x: Bitstring,
    y: Bitstring,
    policy: Adaptive,
    problem: Problem,
    model: NoiseModel,
    rng: np.random.Generator,
    counter: EvalCounter,
) -> ComparisonOutcome:
    """Compare offspring x against incumbent y under the adaptive rule.

    Ties (only possible after escalation) favour the offspring, mirroring
    the >= acceptance of the elitist algorithms.
    """
    if not isinstance(policy, Adaptive):
        raise ValueError("adaptive_compare requires an Adaptive policy")
    validate_model(model, problem)
    zx = _summaries(problem, x)
    zy = _summaries(problem, y)
    pcode = _pcode(problem)
    n = problem.n
    fx = _engine._noise_draw(pcode, model.code, model.p, n, *zx, rng)
    fy = _engine._noise_draw(pcode, model.code, model.p, n, *zy, rng)
    counter.add(2)
    gap = abs(fx - fy)
    if policy.t_low <= gap < policy.t_high:
        return ComparisonOutcome(bool(fx >= fy), 2, "direct")
    m = policy.m_escalate
    mx = _engine.estimate_mean(pcode, model.code, model.p, n, *zx, m, rng)
    my = _engine.estimate_mean(pcode, model.code, model.p, n, *zy, m, rng)
    counter.add(2 * m)
    return ComparisonOutcome(bool(mx >= my), 2 + 2 * m, "escalated")


def compare(
    x: Bitstring,
    y: Bitstring,
    policy: SamplePolicy,
    problem: Problem,
    model: NoiseModel,
    rng: np.random.Generator,
    counter: EvalCounter,
) -> ComparisonOutcome:
    """Value-based comparison for Single/Fixed, comparator for Adaptive."""
    if isinstance(policy, Adaptive):
        return adaptive_compare(x, y, policy, problem, model, rng, counter)
    m = sample_size(policy)
    fx = estimate(policy, problem, model, x, rng, counter)
    fy = estimate(policy, problem, model, y, rng, counter)
    return ComparisonOutcome(bool(fx >= fy), 2 * m, "averaged")


@dataclass(frozen=True)
class MisrankEstimate:
    value: float
    ci_low: float
    ci_high: float
    method: str  # exact | monte-carlo


def _support_bounds(spec) -> tuple[float, float]:
    lo = min(v for v, _ in spec.atoms) if spec.atoms else np.inf
    hi = max(v for v, _ in spec.atoms) if spec.atoms else -np.inf
    if spec.continuous is not None:
        lo = min(lo, spec.continuous[0])
        hi = max(hi, spec.continuous[1])
    return lo, hi


def misrank_probability_adaptive(
    n: int,
    i: int,
    j: int,
    policy: Adaptive | None = None,
    mc_calls: int = 10**6,
    rng: np.random.Generator | None = None,
) -> MisrankEstimate:
    """P(the comparator judges class j not worse than class i-1), OneMax
    under segmented noise.

    The better solution has i-1 zeros, the worse one j >= i zeros. Exact
    whenever every probe-pair resolves on the direct route, or when the
    escalated verdict is forced by disjoint supports; otherwise a Monte
    Carlo estimate of the full comparator with a 95% Wilson interval.
    """
    if n % 200 != 0:
        raise ValueError(f"segmented noise requires n divisible by 200, got n={n}")
    if not 1 <= i <= j <= n:
        raise ValueError(f"need 1 <= i <= j <= n, got i={i}, j={j}, n={n}")
    if policy is None:
        policy = Adaptive.for_n(n)
    problem = Problem(ONEMAX, n)
    model = SegmentedNoise()
    spec_better = noise_spectrum(problem, model, i - 1)
    spec_worse = noise_spectrum(problem, model, j)

    exact = 0.0
    escalated_mass = 0.0
    # continuous components never resolve on the direct route: against any
    # atom the gap is >= n^4, against each other it is < 1
    cont_mass_b = spec_better.continuous[2] if spec_better.continuous else 0.0
    cont_mass_w = spec_worse.continuous[2] if spec_worse.continuous else 0.0
    escalated_mass += cont_mass_w + cont_mass_b - cont_mass_w * cont_mass_b
    for vw, pw in spec_worse.atoms:
        for vb, pb in spec_better.atoms:
            gap = abs(vw - vb)
            if policy.t_low <= gap < policy.t_high:
                if vw >= vb:
                    exact += pw * pb
            else:
                escalated_mass += pw * pb
    if escalated_mass <= 0.0:
        return MisrankEstimate(exact, exact, exact, "exact")
    # escalated verdicts are still deterministic when the supports never
    # interleave: every draw of one class beats every draw of the other
    lo_b, hi_b = _support_bounds(spec_better)
    lo_w, hi_w = _support_bounds(spec_worse)
    if hi_w < lo_b:
        return MisrankEstimate(exact, exact, exact, "exact")
    if lo_w > hi_b:
        value = exact + escalated_mass
        return MisrankEstimate(value, value, value, "exact")
    if rng is None:
        raise ValueError("Monte Carlo path needs an explicit rng")
    wins = _engine.comparator_mc(
        n, model.code, model.p, j, i - 1,
        policy.t_low, policy.t_high, policy.m_escalate, mc_calls, rng,
    )
    low, high = wilson_interval(int(wins), mc_calls)
    return MisrankEstimate(wins / mc_calls, low, high, "monte-carlo")
