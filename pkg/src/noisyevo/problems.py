"""True (noise-free) fitness functions and optimum detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitstrings import Bitstring

ONEMAX = "onemax"
LEADINGONES = "leadingones"


@dataclass(frozen=True)
class Problem:
    """A benchmark instance. Both kinds have optimum n, attained only by 1^n."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (ONEMAX, LEADINGONES):
            raise ValueError(f"unknown problem kind: {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"problem size must be >= 1, got {self.n}")

    @property
    def optimum(self) -> int:
        return self.n


def _check_length(problem: Problem, x: Bitstring) -> None:
    if x.shape[0] != problem.n:
        raise ValueError(
            f"solution length {x.shape[0]} does not match problem size {problem.n}"
        )


def leading_ones(x: Bitstring) -> int:
    """Length of the maximal all-ones prefix."""
    zeros = np.flatnonzero(x == 0)
    return int(zeros[0]) if zeros.size else x.shape[0]


def true_fitness(problem: Problem, x: Bitstring) -> int:
    """Exact fitness: ones count for OneMax, all-ones prefix length for LeadingOnes."""
    _check_length(problem, x)
    if problem.kind == ONEMAX:
        return int(x.sum())
    return leading_ones(x)


def is_optimum(problem: Problem, x: Bitstring) -> bool:
    """True iff x = 1^n. Checked structurally, never through noisy values."""
    _check_length(problem, x)
    return bool((x == 1).all())


def parse_problem(text: str, n: int) -> Problem:
    """Parse a config name ("onemax" | "leadingones") into a Problem."""
    return Problem(kind=text.strip().lower(), n=n)
