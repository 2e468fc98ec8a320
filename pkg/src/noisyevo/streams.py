"""Deterministic random-stream derivation.

Every stochastic component takes an explicit numpy Generator. Streams are
derived from (seed, trial, purpose) so that the draw sequence of any trial
is fixed by its coordinates alone, independent of execution order or the
number of workers.
"""

from __future__ import annotations

import zlib

import numpy as np


def purpose_code(purpose: str) -> int:
    """Stable 32-bit code for a purpose tag."""
    return zlib.crc32(purpose.encode("utf-8"))


def spawn_rng(seed: int, trial: int = 0, purpose: str = "") -> np.random.Generator:
    """Derive an independent generator for (seed, trial, purpose).

    Identical arguments always yield an identical draw sequence; distinct
    (trial, purpose) pairs yield independent streams of the same base seed.
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    if trial < 0:
        raise ValueError(f"trial index must be non-negative, got {trial}")
    key = np.random.SeedSequence(entropy=seed, spawn_key=(trial, purpose_code(purpose)))
    return np.random.default_rng(key)
