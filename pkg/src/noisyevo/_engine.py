"""Jitted inner loops shared by the public modules.

Everything here operates on plain scalars and arrays. A solution is carried
as its bits plus three summaries that the noise laws need: zeros (number of
0-bits), lo (leading-ones value) and lo_tail (length of the all-ones run
right after the first 0). Noise draws depend only on the summaries, which
lets the (1+1) loop mutate in place and still reevaluate the parent.

The scaled acceptance experiments push through 1e9+ noisy evaluations, so
the per-trial loops must stay inside numba. Draw order is part of the
reproducibility contract and is pinned by tests: mutation draws, then the
offspring evaluation(s), then the parent/population evaluations.
"""

from __future__ import annotations

import numpy as np
from numba import njit

PROB_ONEMAX = 0
PROB_LEADINGONES = 1

NOISE_ONEBIT = 0
NOISE_SYMMETRIC = 1
NOISE_REVERSE = 2
NOISE_SEGMENTED = 3

RULE_REPLACE = 0
RULE_ADD_DELETE = 1

_NO_TRACE = np.empty(0, dtype=np.int64)


@njit(cache=True, nogil=True)
def _ones_run(bits, start):
    n = bits.shape[0]
    i = start
    while i < n and bits[i] == 1:
        i += 1
    return i - start


@njit(cache=True, nogil=True)
def _summaries(bits):
    # zeros, lo, lo_tail for a solution
    n = bits.shape[0]
    zeros = 0
    for i in range(n):
        if bits[i] == 0:
            zeros += 1
    lo = _ones_run(bits, 0)
    lo_tail = _ones_run(bits, lo + 1) if lo < n else 0
    return zeros, lo, lo_tail


@njit(cache=True, nogil=True)
def _noise_draw(problem, noise, p, n, zeros, lo, lo_tail, rng):
    """One noisy fitness evaluation of a solution with the given summaries."""
    if problem == PROB_ONEMAX:
        f = float(n - zeros)
    else:
        f = float(lo)
    if noise == NOISE_ONEBIT:
        if p > 0.0 and rng.random() < p:
            if problem == PROB_ONEMAX:
                # a flipped 0-bit gains one, a flipped 1-bit loses one
                if rng.random() * n < zeros:
                    return f + 1.0
                return f - 1.0
            u = rng.integers(0, n)
            if u < lo:
                return float(u)
            if u == lo:
                # flips the first 0; the prefix extends across the tail run
                return float(lo + 1 + lo_tail)
            return f
        return f
    if noise == NOISE_SYMMETRIC:
        if rng.random() < 0.5:
            return f
        return 2.0 * n - f
    if noise == NOISE_REVERSE:
        if rng.random() < 0.5:
            return f
        return -f
    # segmented noise; bands compared in exact integer arithmetic
    if zeros * 50 > n:
        return float(n - zeros)
    if zeros * 100 > n:
        if rng.random() < 0.5 + 1.0 / n:
            return float(n - zeros)
        return float(3 * n + zeros)
    if zeros * 200 > n:
        if rng.random() < 1.0 - 1.0 / n:
            return 4.0 * n * (n - zeros)
        return float(2 * n + zeros) ** 3
    if rng.random() < 0.2:
        return float(n) ** 4 * (n - zeros)
    return -(float(n) ** 4) - rng.random()


@njit(cache=True, nogil=True)
def _estimate_sum(problem, noise, p, n, zeros, lo, lo_tail, m, rng):
    s = 0.0
    for _ in range(m):
        s += _noise_draw(problem, noise, p, n, zeros, lo, lo_tail, rng)
    return s


@njit(cache=True, nogil=True)
def noise_draw_many(problem, noise, p, n, zeros, lo, lo_tail, size, rng):
    out = np.empty(size, dtype=np.float64)
    for i in range(size):
        out[i] = _noise_draw(problem, noise, p, n, zeros, lo, lo_tail, rng)
    return out


@njit(cache=True, nogil=True)
def estimate_mean(problem, noise, p, n, zeros, lo, lo_tail, m, rng):
    return _estimate_sum(problem, noise, p, n, zeros, lo, lo_tail, m, rng) / m


@njit(cache=True, nogil=True)
def _init_bits(bits, rng):
    n = bits.shape[0]
    for i in range(n):
        bits[i] = 1 if rng.random() < 0.5 else 0


@njit(cache=True, nogil=True)
def _flip_inplace(bits, rng, flipped):
    """Bit-wise mutation: flip count ~ Binomial(n, 1/n), positions distinct.

    Returns (k, dz): number of flipped bits and the change in zeros count.
    Flipped positions are recorded so a rejected move can be reverted.
    """
    n = bits.shape[0]
    k = rng.binomial(n, 1.0 / n)
    c = 0
    while c < k:
        pos = rng.integers(0, n)
        dup = False
        for t in range(c):
            if flipped[t] == pos:
                dup = True
                break
        if not dup:
            flipped[c] = pos
            c += 1
    dz = 0
    for t in range(k):
        pos = flipped[t]
        if bits[pos] == 1:
            dz += 1
        else:
            dz -= 1
        bits[pos] ^= 1
    return k, dz


@njit(cache=True, nogil=True)
def _revert(bits, flipped, k):
    for t in range(k):
        bits[flipped[t]] ^= 1


@njit(cache=True, nogil=True)
def _true_fitness(problem, n, zeros, lo):
    if problem == PROB_ONEMAX:
        return n - zeros
    return lo


@njit(cache=True, nogil=True)
def one_plus_one_fixed(n, problem, noise, p, m, budget, rng, trace):
    bits = np.empty(n, dtype=np.uint8)
    _init_bits(bits, rng)
    zeros, lo, lo_tail = _summaries(bits)
    total = np.int64(0)
    # initial estimation: charged per the run-time accounting, value unused
    # because both solutions are reevaluated fresh in every iteration
    _estimate_sum(problem, noise, p, n, zeros, lo, lo_tail, m, rng)
    total += m
    if zeros == 0:
        return True, np.int64(0), total, total
    gens = np.int64(0)
    flipped = np.empty(n, dtype=np.int64)
    while total < budget:
        k, dz = _flip_inplace(bits, rng, flipped)
        czeros = zeros + dz
        if problem == PROB_LEADINGONES:
            clo = _ones_run(bits, 0)
            clo_tail = _ones_run(bits, clo + 1) if clo < n else 0
        else:
            clo = 0
            clo_tail = 0
        if czeros == 0:
            return True, gens, total, total
        sc = _estimate_sum(problem, noise, p, n, czeros, clo, clo_tail, m, rng)
        sx = _estimate_sum(problem, noise, p, n, zeros, lo, lo_tail, m, rng)
        total += 2 * m
        gens += 1
        if sc >= sx:
            zeros = czeros
            lo = clo
            lo_tail = clo_tail
        else:
            _revert(bits, flipped, k)
        if gens <= trace.shape[0]:
            trace[gens - 1] = _true_fitness(problem, n, zeros, lo)
    return False, gens, np.int64(-1), total


@njit(cache=True, nogil=True)
def one_plus_one_adaptive(n, problem, noise, p, t_low, t_high, m_esc, budget, rng, trace):
    bits = np.empty(n, dtype=np.uint8)
    _init_bits(bits, rng)
    zeros, lo, lo_tail = _summaries(bits)
    total = np.int64(0)
    if zeros == 0:
        return True, np.int64(0), total, total
    gens = np.int64(0)
    flipped = np.empty(n, dtype=np.int64)
    while total < budget:
        k, dz = _flip_inplace(bits, rng, flipped)
        czeros = zeros + dz
        if problem == PROB_LEADINGONES:
            clo = _ones_run(bits, 0)
            clo_tail = _ones_run(bits, clo + 1) if clo < n else 0
        else:
            clo = 0
            clo_tail = 0
        if czeros == 0:
            return True, gens, total, total
        fc = _noise_draw(problem, noise, p, n, czeros, clo, clo_tail, rng)
        fx = _noise_draw(problem, noise, p, n, zeros, lo, lo_tail, rng)
        total += 2
        gap = abs(fc - fx)
        if t_low <= gap < t_high:
            not_worse = fc >= fx
        else:
            sc = _estimate_sum(problem, noise, p, n, czeros, clo, clo_tail, m_esc, rng)
            sx = _estimate_sum(problem, noise, p, n, zeros, lo, lo_tail, m_esc, rng)
            total += 2 * m_esc
            not_worse = sc >= sx
        gens += 1
        if not_worse:
            zeros = czeros
            lo = clo
            lo_tail = clo_tail
        else:
            _revert(bits, flipped, k)
        if gens <= trace.shape[0]:
            trace[gens - 1] = _true_fitness(problem, n, zeros, lo)
    return False, gens, np.int64(-1), total


@njit(cache=True, nogil=True)
def _argmin_uniform(vals, count, rng):
    best = 0
    ties = 1
    for r in range(1, count):
        if vals[r] < vals[best]:
            best = r
            ties = 1
        elif vals[r] == vals[best]:
            ties += 1
            if rng.random() * ties < 1.0:
                best = r
    return best


@njit(cache=True, nogil=True)
def _argmax_uniform(vals, count, rng):
    best = 0
    ties = 1
    for r in range(1, count):
        if vals[r] > vals[best]:
            best = r
            ties = 1
        elif vals[r] == vals[best]:
            ties += 1
            if rng.random() * ties < 1.0:
                best = r
    return best


@njit(cache=True, nogil=True)
def mu_plus_one_fixed(n, mu, rule, problem, noise, p, m, budget, rng, trace):
    pop = np.empty((mu, n), dtype=np.uint8)
    zeros = np.empty(mu, dtype=np.int64)
    lo = np.empty(mu, dtype=np.int64)
    lo_tail = np.empty(mu, dtype=np.int64)
    for r in range(mu):
        _init_bits(pop[r], rng)
        zeros[r], lo[r], lo_tail[r] = _summaries(pop[r])
    total = np.int64(0)
    for r in range(mu):
        _estimate_sum(problem, noise, p, n, zeros[r], lo[r], lo_tail[r], m, rng)
        total += m
    for r in range(mu):
        if zeros[r] == 0:
            return True, np.int64(0), total, total
    gens = np.int64(0)
    flipped = np.empty(n, dtype=np.int64)
    child = np.empty(n, dtype=np.uint8)
    fvals = np.empty(mu + 1, dtype=np.float64)
    while total < budget:
        pi = rng.integers(0, mu) if mu > 1 else 0
        child[:] = pop[pi]
        k, dz = _flip_inplace(child, rng, flipped)
        czeros = zeros[pi] + dz
        if problem == PROB_LEADINGONES:
            clo = _ones_run(child, 0)
            clo_tail = _ones_run(child, clo + 1) if clo < n else 0
        else:
            clo = 0
            clo_tail = 0
        if czeros == 0:
            return True, gens, total, total
        sc = _estimate_sum(problem, noise, p, n, czeros, clo, clo_tail, m, rng)
        for r in range(mu):
            fvals[r] = _estimate_sum(problem, noise, p, n, zeros[r], lo[r], lo_tail[r], m, rng)
        total += (mu + 1) * m
        gens += 1
        if rule == RULE_REPLACE:
            z = _argmin_uniform(fvals, mu, rng)
            if sc >= fvals[z]:
                pop[z] = child
                zeros[z] = czeros
                lo[z] = clo
                lo_tail[z] = clo_tail
        else:
            fvals[mu] = sc
            z = _argmin_uniform(fvals, mu + 1, rng)
            if z != mu:
                pop[z] = child
                zeros[z] = czeros
                lo[z] = clo
                lo_tail[z] = clo_tail
        if gens <= trace.shape[0]:
            best = _true_fitness(problem, n, zeros[0], lo[0])
            for r in range(1, mu):
                fr = _true_fitness(problem, n, zeros[r], lo[r])
                if fr > best:
                    best = fr
            trace[gens - 1] = best
    return False, gens, np.int64(-1), total


@njit(cache=True, nogil=True)
def one_plus_lambda_fixed(n, lam, problem, noise, p, m, budget, rng, trace):
    bits = np.empty(n, dtype=np.uint8)
    _init_bits(bits, rng)
    zeros, lo, lo_tail = _summaries(bits)
    total = np.int64(0)
    _estimate_sum(problem, noise, p, n, zeros, lo, lo_tail, m, rng)
    total += m
    if zeros == 0:
        return True, np.int64(0), total, total
    gens = np.int64(0)
    flipped = np.empty(n, dtype=np.int64)
    children = np.empty((lam, n), dtype=np.uint8)
    czeros = np.empty(lam, dtype=np.int64)
    clo = np.empty(lam, dtype=np.int64)
    clo_tail = np.empty(lam, dtype=np.int64)
    fc = np.empty(lam, dtype=np.float64)
    while total < budget:
        hit = False
        for j in range(lam):
            children[j] = bits
            k, dz = _flip_inplace(children[j], rng, flipped)
            czeros[j] = zeros + dz
            if problem == PROB_LEADINGONES:
                clo[j] = _ones_run(children[j], 0)
                clo_tail[j] = _ones_run(children[j], clo[j] + 1) if clo[j] < n else 0
            else:
                clo[j] = 0
                clo_tail[j] = 0
            if czeros[j] == 0:
                hit = True
                break
        if hit:
            return True, gens, total, total
        for j in range(lam):
            fc[j] = _estimate_sum(problem, noise, p, n, czeros[j], clo[j], clo_tail[j], m, rng)
        sx = _estimate_sum(problem, noise, p, n, zeros, lo, lo_tail, m, rng)
        total += (lam + 1) * m
        gens += 1
        z = _argmax_uniform(fc, lam, rng)
        if fc[z] >= sx:
            bits[:] = children[z]
            zeros = czeros[z]
            lo = clo[z]
            lo_tail = clo_tail[z]
        if gens <= trace.shape[0]:
            trace[gens - 1] = _true_fitness(problem, n, zeros, lo)
    return False, gens, np.int64(-1), total


@njit(cache=True, nogil=True)
def comparator_mc(n, noise, p, zeros_x, zeros_y, t_low, t_high, m_esc, calls, rng):
    """Run the adaptive comparator `calls` times on two OneMax classes.

    Returns how often x (the offspring side, evaluated first) was judged
    not worse than y.
    """
    wins = 0
    for _ in range(calls):
        fx = _noise_draw(PROB_ONEMAX, noise, p, n, zeros_x, 0, 0, rng)
        fy = _noise_draw(PROB_ONEMAX, noise, p, n, zeros_y, 0, 0, rng)
        gap = abs(fx - fy)
        if t_low <= gap < t_high:
            if fx >= fy:
                wins += 1
        else:
            sx = _estimate_sum(PROB_ONEMAX, noise, p, n, zeros_x, 0, 0, m_esc, rng)
            sy = _estimate_sum(PROB_ONEMAX, noise, p, n, zeros_y, 0, 0, m_esc, rng)
            if sx >= sy:
                wins += 1
    return wins


@njit(cache=True, nogil=True)
def acceptance_mc(n, noise, p, zeros_i, zeros_j, m, reps, rng):
    """Count how often the class-j estimate is >= the class-i estimate."""
    wins = 0
    for _ in range(reps):
        sj = _estimate_sum(PROB_ONEMAX, noise, p, n, zeros_j, 0, 0, m, rng)
        si = _estimate_sum(PROB_ONEMAX, noise, p, n, zeros_i, 0, 0, m, rng)
        if sj >= si:
            wins += 1
    return wins


@njit(cache=True, nogil=True)
def one_plus_one_generation_deltas(n, noise, p, zeros0, m, reps, rng):
    """Monte Carlo of one (1+1)-EA generation on OneMax from zeros-count zeros0.

    Returns the observed state decrease (zeros0 - zeros_after) per replicate;
    0 when the offspring was rejected or the move was neutral.
    """
    bits = np.empty(n, dtype=np.uint8)
    flipped = np.empty(n, dtype=np.int64)
    out = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        for i in range(n):
            bits[i] = 0 if i < zeros0 else 1
        k, dz = _flip_inplace(bits, rng, flipped)
        czeros = zeros0 + dz
        sc = _estimate_sum(PROB_ONEMAX, noise, p, n, czeros, 0, 0, m, rng)
        sx = _estimate_sum(PROB_ONEMAX, noise, p, n, zeros0, 0, 0, m, rng)
        out[r] = zeros0 - czeros if sc >= sx else 0
    return out
