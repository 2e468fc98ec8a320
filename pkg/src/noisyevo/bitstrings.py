"""Binary solutions and bit-wise mutation.

A bitstring is a 1-d numpy uint8 array of 0/1 values. Arrays returned by
this module are marked read-only; treat them as immutable values. The
textual form is an ASCII string of '0'/'1' with the leftmost character
being bit 1 (prefixes are counted from the left).
"""

from __future__ import annotations

import numpy as np

Bitstring = np.ndarray


def _freeze(bits: np.ndarray) -> np.ndarray:
    bits.flags.writeable = False
    return bits


def random_bitstring(n: int, rng: np.random.Generator) -> Bitstring:
    """Uniformly random solution: each bit is 1 with probability 1/2."""
    if n < 1:
        raise ValueError(f"problem size must be >= 1, got {n}")
    return _freeze((rng.random(n) < 0.5).astype(np.uint8))


def mutate(x: Bitstring, rng: np.random.Generator) -> Bitstring:
    """Flip each bit of x independently with probability 1/n.

    Returns a fresh bitstring; x is not modified.
    """
    n = x.shape[0]
    flips = rng.random(n) < (1.0 / n)
    child = x.copy()
    child[flips] ^= 1
    return _freeze(child)


def zeros_count(x: Bitstring) -> int:
    """Number of 0-bits."""
    return int(x.shape[0] - x.sum())


def ones_count(x: Bitstring) -> int:
    """Number of 1-bits."""
    return int(x.sum())


def to_text(x: Bitstring) -> str:
    return "".join("1" if b else "0" for b in x)


def from_text(s: str) -> Bitstring:
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"not a bitstring literal: {s!r}")
    return _freeze(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))
