"""Exact and Monte Carlo machinery behind the runtime analysis.

Covers the class-aggregated mutation kernel, acceptance probabilities of
the (1+1)-EA comparison under sampling (by exact m-fold convolution of the
noise spectra where they are discrete), the drift decomposition E+ / E-,
and the closed-form expected noisy LeadingOnes fitness under one-bit noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import _engine
from .noise import (
    NoiseModel,
    SegmentedNoise,
    Spectrum,
    model_name,
    noise_spectrum,
)
from .problems import ONEMAX, Problem
from .stats import wilson_interval

SUPPORT_GUARD = 10**6


@dataclass(frozen=True)
class Kernel:
    """Mutation law aggregated over zeros-count classes: P(j | i)."""

    n: int
    i: int
    probabilities: np.ndarray  # index j in [0, n]


def mutation_kernel(n: int, i: int) -> Kernel:
    """Distribution of the offspring zeros-count after bit-wise mutation.

    P(j | i) sums over (a zero-bits flipped, b one-bits flipped) with
    i - a + b = j, each side binomial with rate 1/n.
    """
    if not 0 <= i <= n:
        raise ValueError(f"zeros-count {i} out of range for n={n}")
    p = 1.0 / n
    pmf_zeros = sps.binom.pmf(np.arange(i + 1), i, p)        # a flipped 0-bits
    pmf_ones = sps.binom.pmf(np.arange(n - i + 1), n - i, p)  # b flipped 1-bits
    # j = i - a + b, so P over j is the cross-correlation of the two pmfs
    probs = np.convolve(pmf_ones, pmf_zeros[::-1])
    return Kernel(n=n, i=i, probabilities=probs)


def _atoms_arrays(spec: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    vals = np.array([v for v, _ in spec.atoms], dtype=np.float64)
    probs = np.array([p for _, p in spec.atoms], dtype=np.float64)
    return vals, probs


def _convolve(a: tuple[np.ndarray, np.ndarray], b: tuple[np.ndarray, np.ndarray]):
    va, pa = a
    vb, pb = b
    if va.size * vb.size > 4 * SUPPORT_GUARD:
        raise ValueError("convolution support exceeds the tractability guard")
    sums = np.add.outer(va, vb).ravel()
    weights = np.multiply.outer(pa, pb).ravel()
    vals, inverse = np.unique(sums, return_inverse=True)
    probs = np.bincount(inverse, weights=weights)
    if vals.size > SUPPORT_GUARD:
        raise ValueError("convolution support exceeds the tractability guard")
    return vals, probs


def _mfold(spec: Spectrum, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of the sum of m independent draws (discrete spectra only)."""
    base = _atoms_arrays(spec)
    result = None
    power = base
    k = m
    while k:
        if k & 1:
            result = power if result is None else _convolve(result, power)
        k >>= 1
        if k:
            power = _convolve(power, power)
    return result


def _exact_ordering(spec_i: Spectrum, spec_j: Spectrum, m: int):
    """(P(sum_j > sum_i), P(tie), P(sum_j < sum_i)) for m-draw sums."""
    vj, pj = _mfold(spec_j, m)
    vi, pi = _mfold(spec_i, m)
    cdf_i = np.cumsum(pi)
    # P(sum_i < v) and P(sum_i <= v) at each point of the j-support
    below = np.searchsorted(vi, vj, side="left")
    incl = np.searchsorted(vi, vj, side="right")
    p_j_wins = float(np.sum(pj * np.where(below > 0, cdf_i[below - 1], 0.0)))
    p_j_not_worse = float(np.sum(pj * np.where(incl > 0, cdf_i[incl - 1], 0.0)))
    p_tie = p_j_not_worse - p_j_wins
    return p_j_wins, p_tie, 1.0 - p_j_not_worse


@dataclass(frozen=True)
class ProbabilityEstimate:
    value: float
    ci_low: float
    ci_high: float
    method: str  # exact | monte-carlo


def _has_continuous(spec: Spectrum) -> bool:
    return spec.continuous is not None


def acceptance_probability(
    n: int,
    i: int,
    j: int,
    model: NoiseModel,
    m: int,
    method: str = "exact",
    rng: np.random.Generator | None = None,
    mc_reps: int = 10**5,
) -> ProbabilityEstimate:
    """P(mean of m draws for class j >= mean of m draws for class i), OneMax.

    Exact via convolution of the two spectra when both are discrete; the
    segmented case-4 classes carry a continuous component and route to
    Monte Carlo automatically.
    """
    if m < 1:
        raise ValueError(f"sample size must be >= 1, got {m}")
    problem = Problem(ONEMAX, n)
    spec_i = noise_spectrum(problem, model, i)
    spec_j = noise_spectrum(problem, model, j)
    if method not in ("exact", "monte-carlo"):
        raise ValueError(f"unknown method: {method!r}")
    if method == "exact" and not (_has_continuous(spec_i) or _has_continuous(spec_j)):
        p_gt, p_tie, _ = _exact_ordering(spec_i, spec_j, m)
        value = p_gt + p_tie
        return ProbabilityEstimate(value, value, value, "exact")
    if rng is None:
        raise ValueError("Monte Carlo path needs an explicit rng")
    wins = _engine.acceptance_mc(n, model.code, model.p, i, j, m, mc_reps, rng)
    low, high = wilson_interval(int(wins), mc_reps)
    return ProbabilityEstimate(wins / mc_reps, low, high, "monte-carlo")


def ordering_probabilities(
    n: int, i: int, j: int, model: NoiseModel, m: int
) -> tuple[float, float, float]:
    """Exact (P(j-mean > i-mean), P(tie), P(j-mean < i-mean))."""
    problem = Problem(ONEMAX, n)
    spec_i = noise_spectrum(problem, model, i)
    spec_j = noise_spectrum(problem, model, j)
    if _has_continuous(spec_i) or _has_continuous(spec_j):
        raise ValueError("exact ordering needs discrete spectra on both sides")
    return _exact_ordering(spec_i, spec_j, m)


@dataclass(frozen=True)
class DriftRecord:
    i: int
    e_plus: float
    e_minus: float
    drift: float
    method: str  # exact | monte-carlo
    ci_halfwidth: float = 0.0


def drift(
    n: int,
    i: int,
    model: NoiseModel,
    m: int,
    method: str | None = None,
    rng: np.random.Generator | None = None,
    mc_reps: int = 10**6,
) -> DriftRecord:
    """One-step drift of the zeros count for the (1+1)-EA on OneMax, Fixed(m).

    E+ and E- weight the mutation kernel by the exact acceptance
    probabilities. Models whose spectra include a continuous component
    (segmented, via its case-4 classes) fall back to Monte Carlo.
    """
    if not 0 <= i <= n:
        raise ValueError(f"zeros-count {i} out of range for n={n}")
    if method is None:
        method = "monte-carlo" if isinstance(model, SegmentedNoise) else "exact"
    if method == "exact":
        kernel = mutation_kernel(n, i).probabilities
        e_plus = 0.0
        e_minus = 0.0
        for j in range(n + 1):
            if j == i or kernel[j] < 1e-18:
                continue
            acc = acceptance_probability(n, i, j, model, m).value
            if j < i:
                e_plus += kernel[j] * acc * (i - j)
            else:
                e_minus += kernel[j] * acc * (j - i)
        return DriftRecord(i=i, e_plus=e_plus, e_minus=e_minus,
                           drift=e_plus - e_minus, method="exact")
    if method != "monte-carlo":
        raise ValueError(f"unknown method: {method!r}")
    if rng is None:
        raise ValueError("Monte Carlo path needs an explicit rng")
    deltas = _engine.one_plus_one_generation_deltas(
        n, model.code, model.p, i, m, mc_reps, rng
    )
    deltas = deltas.astype(np.float64)
    e_plus = float(np.mean(np.maximum(deltas, 0.0)))
    e_minus = float(np.mean(np.maximum(-deltas, 0.0)))
    half = 1.959963984540054 * float(np.std(deltas)) / np.sqrt(mc_reps)
    return DriftRecord(i=i, e_plus=e_plus, e_minus=e_minus,
                       drift=e_plus - e_minus, method="monte-carlo",
                       ci_halfwidth=half)


def expected_noisy_leadingones(n: int, k: int, p: float = 1.0) -> float:
    """E(f^n(1^k 0 1^(n-k-1))) under one-bit noise; k = n means 1^n.

    At p = 1 this is sum_{j<=k} (j-1)/n + 1 + k(n-k-1)/n, whose consecutive
    differences are (n-k-1)/n.
    """
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise probability must be in [0, 1], got {p}")
    if k == n:
        flipped = (n - 1) / 2.0
        return (1.0 - p) * n + p * flipped
    flipped = k * (k - 1) / (2.0 * n) + 1.0 + k * (n - k - 1) / n
    return (1.0 - p) * k + p * flipped


def segment_expectation(n: int, k: int) -> float:
    """Exact E(f^n) for a segment-2 class (n/100 < k <= n/50): 2n - 2 - 2k/n."""
    if n % 200 != 0:
        raise ValueError(f"segmented noise requires n divisible by 200, got n={n}")
    if not k * 100 > n >= k * 50:
        raise ValueError(f"k={k} is not in segment 2 for n={n}")
    return 2.0 * n - 2.0 - 2.0 * k / n


ANALYSIS_CSV_COLUMNS = ["n", "i", "j", "model", "m", "value", "ci", "method"]


def analysis_csv_rows(records, model: NoiseModel, n: int, m: int, j="") -> list[dict]:
    """Render DriftRecords or (i, ProbabilityEstimate) pairs as export rows."""
    rows = []
    for rec in records:
        if isinstance(rec, DriftRecord):
            rows.append({
                "n": n, "i": rec.i, "j": j, "model": model_name(model), "m": m,
                "value": rec.drift, "ci": rec.ci_halfwidth, "method": rec.method,
            })
        else:
            i, est = rec
            rows.append({
                "n": n, "i": i, "j": j, "model": model_name(model), "m": m,
                "value": est.value, "ci": (est.ci_high - est.ci_low) / 2.0,
                "method": est.method,
            })
    return rows
