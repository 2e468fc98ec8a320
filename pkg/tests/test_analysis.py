from fractions import Fraction

import numpy as np
import pytest

from noisyevo.analysis import (
    acceptance_probability,
    analysis_csv_rows,
    drift,
    expected_noisy_leadingones,
    mutation_kernel,
    ordering_probabilities,
    segment_expectation,
)
from noisyevo.noise import OneBitNoise, ReverseNoise, SegmentedNoise, SymmetricNoise, noise_spectrum
from noisyevo.problems import Problem
from noisyevo.streams import spawn_rng


def test_kernel_two_bits():
    # enumeration oracle: both bits flip independently at rate 1/2
    k = mutation_kernel(2, 0)
    assert np.allclose(k.probabilities, [0.25, 0.5, 0.25], atol=1e-15)


def test_kernel_sums_to_one():
    for n in (2, 20, 100):
        for i in range(n + 1):
            assert abs(mutation_kernel(n, i).probabilities.sum() - 1.0) < 1e-12


def test_kernel_against_simulation():
    # independent numpy simulation of bit-wise mutation, 1e6 replicates
    n, i, reps = 20, 5, 10**6
    gen = spawn_rng(17)
    x = np.concatenate([np.zeros(i, np.int8), np.ones(n - i, np.int8)])
    flips = gen.random((reps, n)) < 1.0 / n
    children = np.where(flips, 1 - x, x)
    zeros_after = n - children.sum(axis=1)
    hist = np.bincount(zeros_after, minlength=n + 1) / reps
    tv = 0.5 * np.abs(hist - mutation_kernel(n, i).probabilities).sum()
    assert tv <= 0.005


def test_kernel_rejects_bad_state():
    with pytest.raises(ValueError):
        mutation_kernel(10, 11)


def test_acceptance_symmetric_exact_values():
    assert acceptance_probability(20, 3, 4, SymmetricNoise(), 1).value == 0.5
    assert acceptance_probability(20, 3, 4, SymmetricNoise(), 2).value == 0.625


def test_acceptance_m2_enumeration_oracle():
    # the four Z outcomes {-2i-1, -1, 1, 2i+1} are equiprobable; enumerate
    # the 16 pairs of Z1 + Z2 and count the non-positive sums
    i = 3
    outcomes = [-(2 * i + 1), -1.0, 1.0, 2 * i + 1]
    accept = sum(1 for a in outcomes for b in outcomes if a + b <= 0) / 16
    assert accept == 0.625
    assert acceptance_probability(20, i, i + 1, SymmetricNoise(), 2).value == accept


def test_acceptance_at_least_half_for_all_m():
    for m in (1, 2, 3, 5, 8):
        for i in (1, 4, 9):
            est = acceptance_probability(20, i, i + 1, SymmetricNoise(), m)
            assert est.value >= 0.5 - 1e-12


def test_ordering_probabilities_sum_and_symmetry():
    for model in (SymmetricNoise(), ReverseNoise()):
        for m in (1, 2, 4):
            for i, j in ((3, 3), (3, 4)):
                gt, tie, lt = ordering_probabilities(20, i, j, model, m)
                assert abs(gt + tie + lt - 1.0) < 1e-12
                if i == j:
                    assert abs(gt - lt) < 1e-12
    # symmetric-about-zero: adjacent classes balance exactly
    gt, _, lt = ordering_probabilities(20, 3, 4, SymmetricNoise(), 3)
    assert abs(gt - lt) < 1e-12


def test_acceptance_monte_carlo_matches_exact():
    rng = spawn_rng(23)
    exact = acceptance_probability(20, 3, 4, SymmetricNoise(), 2).value
    mc = acceptance_probability(20, 3, 4, SymmetricNoise(), 2,
                                method="monte-carlo", rng=rng, mc_reps=10**5)
    assert mc.method == "monte-carlo"
    assert mc.ci_low <= exact <= mc.ci_high


def test_acceptance_segmented_case4_routes_to_mc():
    rng = spawn_rng(29)
    est = acceptance_probability(200, 1, 2, SegmentedNoise(), 1, rng=rng, mc_reps=10**4)
    assert est.method == "monte-carlo"
    # class 2 beats class 1 exactly when class 1 draws its negative tail
    assert abs(est.value - 0.8) < 0.02


def test_convolution_guard():
    with pytest.raises(ValueError):
        ordering_probabilities(20, 3, 4, OneBitNoise(0.5), 3000)


def test_drift_exact_bounds():
    for i in (1, 3, 7, 20, 60):
        rec = drift(100, i, SymmetricNoise(), 1)
        assert rec.e_plus <= i / 100 + 1e-12
        assert abs(rec.drift - (rec.e_plus - rec.e_minus)) < 1e-12
    for i in range(1, 10):
        assert drift(100, i, SymmetricNoise(), 1).drift <= -0.05


def test_drift_noise_free_positive():
    rec = drift(20, 1, OneBitNoise(0.0), 1)
    assert rec.e_minus == 0.0
    assert rec.drift > 0.0


def test_drift_triple_consistency_monte_carlo():
    # one simulated (1+1)-EA generation vs the exact kernel/acceptance sum
    rng = spawn_rng(31)
    for m in (1, 2, 4):
        exact = drift(20, 3, SymmetricNoise(), m)
        mc = drift(20, 3, SymmetricNoise(), m, method="monte-carlo",
                   rng=rng, mc_reps=10**6)
        band = 4 * mc.ci_halfwidth / 1.959963984540054  # 4 sigma
        assert abs(mc.drift - exact.drift) <= band, (m, exact.drift, mc.drift)


def test_drift_segmented_defaults_to_mc():
    rng = spawn_rng(37)
    rec = drift(200, 3, SegmentedNoise(), 1, rng=rng, mc_reps=10**5)
    assert rec.method == "monte-carlo"
    assert rec.ci_halfwidth > 0


def test_expected_noisy_leadingones_values():
    assert expected_noisy_leadingones(4, 0) == 1.0
    assert expected_noisy_leadingones(4, 2) == 1.75
    assert expected_noisy_leadingones(4, 4) == 1.5  # all-ones: (n-1)/2
    with pytest.raises(ValueError):
        expected_noisy_leadingones(4, 5)


def test_expected_noisy_leadingones_rational_oracle():
    # exact rational evaluation of the same sum, and the consecutive
    # difference law (n-k-1)/n
    n = 10
    def rational(k):
        total = sum(Fraction(j - 1, n) for j in range(1, k + 1))
        return total + 1 + Fraction(k * (n - k - 1), n)
    for k in range(n):
        assert abs(expected_noisy_leadingones(n, k) - float(rational(k))) < 1e-12
    for k in range(1, n):
        diff = expected_noisy_leadingones(n, k) - expected_noisy_leadingones(n, k - 1)
        assert abs(diff - (n - k - 1) / n) < 1e-12
        assert rational(k) - rational(k - 1) == Fraction(n - k - 1, n)


def test_expected_matches_spectrum_mean():
    for n, k in ((6, 0), (6, 3), (6, 5), (6, 6), (12, 7)):
        spec = noise_spectrum(Problem("leadingones", n), OneBitNoise(1.0), k)
        assert abs(spec.mean() - expected_noisy_leadingones(n, k)) < 1e-12


def test_segment_expectation():
    assert segment_expectation(200, 3) == 397.97
    assert segment_expectation(200, 4) == 397.96
    spec = noise_spectrum(Problem("onemax", 200), SegmentedNoise(), 3)
    assert abs(spec.mean() - segment_expectation(200, 3)) < 1e-9
    with pytest.raises(ValueError):
        segment_expectation(200, 2)  # segment 3, not 2
    with pytest.raises(ValueError):
        segment_expectation(100, 3)


def test_analysis_csv_rows():
    recs = [drift(100, i, SymmetricNoise(), 1) for i in (1, 2)]
    rows = analysis_csv_rows(recs, SymmetricNoise(), 100, 1)
    assert [r["i"] for r in rows] == [1, 2]
    assert all(r["method"] == "exact" and r["ci"] == 0.0 for r in rows)
