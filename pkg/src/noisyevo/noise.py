"""The four noise models: one noisy evaluation per call, atomically counted.

Each model maps a solution's true fitness to a random noisy value:

* one-bit: with probability p, report the fitness of a copy with one
  uniformly chosen bit flipped (the stored solution is never modified)
* symmetric: report 2n - f(x) with probability 1/2
* reverse: report -f(x) with probability 1/2
* segmented: four regimes over zeros-count bands (boundaries n/50, n/100,
  n/200; requires n divisible by 200), the last mixing a huge positive atom
  with a continuous negative tail -n^4 - U[0,1]

`noise_spectrum` returns the exact distribution for the solution classes the
state abstraction covers: any zeros-count class on OneMax, and the single-gap
patterns 1^k 0 1^(n-k-1) (plus the all-ones string, addressed as k = n) on
LeadingOnes under one-bit noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .bitstrings import Bitstring, zeros_count
from .problems import LEADINGONES, ONEMAX, Problem, leading_ones


class NoSpectrumError(ValueError):
    """Raised when a solution class has no exact spectrum."""


@dataclass(frozen=True)
class OneBitNoise:
    p: float = 1.0
    name = "onebit"
    code = _engine.NOISE_ONEBIT

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"one-bit noise probability must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class SymmetricNoise:
    name = "symmetric"
    code = _engine.NOISE_SYMMETRIC
    p = 0.0


@dataclass(frozen=True)
class ReverseNoise:
    name = "reverse"
    code = _engine.NOISE_REVERSE
    p = 0.0


@dataclass(frozen=True)
class SegmentedNoise:
    """Boundaries are the fractions 1/50, 1/100 and 1/200 of n."""

    name = "segmented"
    code = _engine.NOISE_SEGMENTED
    p = 0.0


NoiseModel = OneBitNoise | SymmetricNoise | ReverseNoise | SegmentedNoise


def validate_model(model: NoiseModel, problem: Problem) -> None:
    """Reject model/problem pairings the noise law is not defined for."""
    if isinstance(model, SegmentedNoise) and problem.n % 200 != 0:
        raise ValueError(
            f"segmented noise requires n divisible by 200, got n={problem.n}"
        )


def parse_model(text: str, n: int | None = None) -> NoiseModel:
    """Parse a config name: onebit:p=<float> | symmetric | reverse | segmented."""
    text = text.strip().lower()
    if text == "symmetric":
        return SymmetricNoise()
    if text == "reverse":
        return ReverseNoise()
    if text == "segmented":
        if n is not None and n % 200 != 0:
            raise ValueError(f"segmented noise requires n divisible by 200, got n={n}")
        return SegmentedNoise()
    if text == "onebit" or text.startswith("onebit:"):
        p = 1.0
        if ":" in text:
            key, _, val = text.partition(":")[2].partition("=")
            if key != "p":
                raise ValueError(f"unknown one-bit noise option: {key!r}")
            p = float(val)
        return OneBitNoise(p=p)
    raise ValueError(f"unknown noise model: {text!r}")


def model_name(model: NoiseModel) -> str:
    if isinstance(model, OneBitNoise):
        return f"onebit:p={model.p:g}"
    return model.name


class EvalCounter:
    """Counts noisy fitness evaluations; incremented by 1 per draw."""

    __slots__ = ("total",)

    def __init__(self) -> None:
        self.total = 0

    def add(self, k: int = 1) -> None:
        self.total += k

    def __repr__(self) -> str:
        return f"EvalCounter(total={self.total})"


def _solution_summaries(x: Bitstring) -> tuple[int, int, int]:
    zeros = zeros_count(x)
    lo = leading_ones(x)
    n = x.shape[0]
    lo_tail = 0
    if lo < n:
        t = lo + 1
        while t < n and x[t] == 1:
            t += 1
        lo_tail = t - (lo + 1)
    return zeros, lo, lo_tail


def noisy_fitness(
    problem: Problem,
    model: NoiseModel,
    x: Bitstring,
    rng: np.random.Generator,
    counter: EvalCounter,
) -> float:
    """One noisy evaluation of x; advances the counter by exactly 1."""
    validate_model(model, problem)
    if x.shape[0] != problem.n:
        raise ValueError(f"solution length {x.shape[0]} != problem size {problem.n}")
    zeros, lo, lo_tail = _solution_summaries(x)
    pcode = _engine.PROB_ONEMAX if problem.kind == ONEMAX else _engine.PROB_LEADINGONES
    value = _engine._noise_draw(pcode, model.code, model.p, problem.n, zeros, lo, lo_tail, rng)
    counter.add(1)
    return float(value)


def sample_many(
    problem: Problem,
    model: NoiseModel,
    x: Bitstring,
    rng: np.random.Generator,
    size: int,
    counter: EvalCounter | None = None,
) -> np.ndarray:
    """Bulk version of noisy_fitness: size independent draws, counter += size."""
    validate_model(model, problem)
    if x.shape[0] != problem.n:
        raise ValueError(f"solution length {x.shape[0]} != problem size {problem.n}")
    zeros, lo, lo_tail = _solution_summaries(x)
    pcode = _engine.PROB_ONEMAX if problem.kind == ONEMAX else _engine.PROB_LEADINGONES
    out = _engine.noise_draw_many(
        pcode, model.code, model.p, problem.n, zeros, lo, lo_tail, size, rng
    )
    if counter is not None:
        counter.add(size)
    return out


@dataclass(frozen=True)
class Spectrum:
    """Exact distribution of one noisy evaluation over a solution class.

    atoms: (value, probability) pairs sorted by value. continuous, when
    present, is a (low, high, mass) uniform component (segmented case 4).
    """

    atoms: tuple[tuple[float, float], ...]
    continuous: tuple[float, float, float] | None = None

    @property
    def total_mass(self) -> float:
        mass = sum(p for _, p in self.atoms)
        if self.continuous is not None:
            mass += self.continuous[2]
        return mass

    def mean(self) -> float:
        m = sum(v * p for v, p in self.atoms)
        if self.continuous is not None:
            low, high, mass = self.continuous
            m += mass * (low + high) / 2.0
        return m

    def variance(self) -> float:
        m = self.mean()
        s = sum(v * v * p for v, p in self.atoms)
        if self.continuous is not None:
            low, high, mass = self.continuous
            s += mass * (low * low + low * high + high * high) / 3.0
        return s - m * m


def _make_spectrum(pairs: list[tuple[float, float]], continuous=None) -> Spectrum:
    merged: dict[float, float] = {}
    for v, p in pairs:
        if p > 0.0:
            merged[v] = merged.get(v, 0.0) + p
    atoms = tuple(sorted(merged.items()))
    return Spectrum(atoms=atoms, continuous=continuous)


def _onemax_spectrum(model: NoiseModel, n: int, i: int) -> Spectrum:
    f = float(n - i)
    if isinstance(model, OneBitNoise):
        p = model.p
        return _make_spectrum(
            [(f, 1.0 - p), (f - 1.0, p * (n - i) / n), (f + 1.0, p * i / n)]
        )
    if isinstance(model, SymmetricNoise):
        return _make_spectrum([(f, 0.5), (2.0 * n - f, 0.5)])
    if isinstance(model, ReverseNoise):
        return _make_spectrum([(f, 0.5), (-f, 0.5)])
    # segmented
    if i * 50 > n:
        return _make_spectrum([(f, 1.0)])
    if i * 100 > n:
        return _make_spectrum([(f, 0.5 + 1.0 / n), (float(3 * n + i), 0.5 - 1.0 / n)])
    if i * 200 > n:
        return _make_spectrum(
            [(4.0 * n * (n - i), 1.0 - 1.0 / n), (float(2 * n + i) ** 3, 1.0 / n)]
        )
    n4 = float(n) ** 4
    return _make_spectrum(
        [(n4 * (n - i), 0.2)], continuous=(-n4 - 1.0, -n4, 0.8)
    )


def _leadingones_onebit_spectrum(p: float, n: int, k: int) -> Spectrum:
    if k == n:
        # all-ones string: a flip at position j leaves j - 1 leading ones
        pairs = [(float(n), 1.0 - p)]
        pairs += [(float(u), p / n) for u in range(n)]
        return _make_spectrum(pairs)
    # pattern 1^k 0 1^(n-k-1): one zero at position k + 1
    pairs = [(float(k), 1.0 - p)]
    pairs += [(float(u), p / n) for u in range(k)]
    pairs.append((float(n), p / n))  # flipping the single 0 yields 1^n
    pairs.append((float(k), p * (n - k - 1) / n))
    return _make_spectrum(pairs)


def noise_spectrum(problem: Problem, model: NoiseModel, state) -> Spectrum:
    """Exact noisy-fitness distribution for a covered solution class.

    state is a zeros-count (OneMax) or the gap position k of the pattern
    1^k 0 1^(n-k-1) with k = n meaning the all-ones string (LeadingOnes,
    one-bit noise only). A concrete Bitstring is classified first.
    """
    validate_model(model, problem)
    n = problem.n
    if isinstance(state, np.ndarray):
        state = _classify(problem, model, state)
    i = int(state)
    if not 0 <= i <= n:
        raise ValueError(f"state {i} out of range for n={n}")
    if problem.kind == ONEMAX:
        return _onemax_spectrum(model, n, i)
    if not isinstance(model, OneBitNoise):
        raise NoSpectrumError(
            f"no exact spectrum for LeadingOnes under {model_name(model)}"
        )
    return _leadingones_onebit_spectrum(model.p, n, i)


def _classify(problem: Problem, model: NoiseModel, x: Bitstring) -> int:
    if x.shape[0] != problem.n:
        raise ValueError(f"solution length {x.shape[0]} != problem size {problem.n}")
    if problem.kind == ONEMAX:
        return zeros_count(x)
    zeros = zeros_count(x)
    if zeros == 0:
        return problem.n
    # a single 0 at position k+1 is exactly the pattern 1^k 0 1^(n-k-1)
    if zeros != 1:
        raise NoSpectrumError(
            "no exact spectrum for arbitrary LeadingOnes solutions; "
            "covered classes are 1^k 0 1^(n-k-1) and 1^n"
        )
    return leading_ones(x)
