"""Noisy evolutionary optimization testbed.

Elitist EAs ((1+1), (mu+1), (1+lambda)) on OneMax/LeadingOnes under four
noise models, with fixed and adaptive sampling, exact drift analysis, and a
seeded experiment harness.
"""

__version__ = "0.1.0"

from .algorithms import (  # noqa: F401
    MuPlusOne,
    OnePlusLambda,
    OnePlusOne,
    TrialResult,
    run_mu_plus_one,
    run_one_plus_lambda,
    run_one_plus_one,
    run_trial,
)
from .bitstrings import from_text, mutate, ones_count, random_bitstring, to_text, zeros_count  # noqa: F401
from .estimation import (  # noqa: F401
    Adaptive,
    ComparisonOutcome,
    Fixed,
    Single,
    adaptive_compare,
    estimate,
    misrank_probability_adaptive,
)
from .noise import (  # noqa: F401
    EvalCounter,
    NoSpectrumError,
    OneBitNoise,
    ReverseNoise,
    SegmentedNoise,
    SymmetricNoise,
    noise_spectrum,
    noisy_fitness,
    sample_many,
)
from .problems import Problem, is_optimum, leading_ones, true_fitness  # noqa: F401
from .streams import spawn_rng  # noqa: F401
