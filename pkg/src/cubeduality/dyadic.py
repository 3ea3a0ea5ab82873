"""Dyadic martingales on [0, 1] and square-function inequalities.

A depth-m martingale is given by its 2^m leaf values (g on the dyadic
intervals of length 2^-m).  Integrals are exact averages over leaves.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bellman import summarize

MAX_DEPTH = 16


@dataclass(frozen=True, eq=False)
class DyadicMartingale:
    leaves: np.ndarray

    def __post_init__(self):
        leaves = np.asarray(self.leaves, dtype=float)
        size = leaves.shape[-1]
        depth = int(round(math.log2(size))) if size > 0 else -1
        if size < 1 or 2**depth != size:
            raise ValueError("number of leaves must be a power of two")
        if depth > MAX_DEPTH:
            raise ValueError(f"depth capped at {MAX_DEPTH}")
        leaves.setflags(write=False)
        object.__setattr__(self, "leaves", leaves)

    @property
    def depth(self):
        return int(round(math.log2(self.leaves.shape[-1])))

    def integral(self):
        return float(np.mean(self.leaves))


def martingale_levels(g):
    """[g_0, ..., g_m]; g_n holds the 2^n dyadic averages at level n."""
    m = g.depth
    leaves = g.leaves
    return [leaves.reshape(2**n, 2 ** (m - n)).mean(axis=1) for n in range(m + 1)]


def _batch_square(leaves):
    """Square function per leaf for an array of shape (..., 2^m)."""
    size = leaves.shape[-1]
    m = int(round(math.log2(size)))
    total = np.zeros_like(leaves)
    prev = np.repeat(leaves.mean(axis=-1, keepdims=True), size, axis=-1)
    for n in range(1, m + 1):
        block = 2 ** (m - n)
        level = leaves.reshape(*leaves.shape[:-1], 2**n, block).mean(axis=-1)
        cur = np.repeat(level, block, axis=-1)
        total += (cur - prev) ** 2
        prev = cur
    return np.sqrt(total)


def square_function(g):
    """S(g) evaluated on each leaf interval."""
    return _batch_square(g.leaves)


def master_bound_gap(U_fn, g):
    """U(int g, 0) - int U(g, S(g)); nonnegative when U satisfies the
    square-function main inequality."""
    s = square_function(g)
    return float(U_fn(g.integral(), 0.0) - np.mean(U_fn(g.leaves, s)))


def cww_gap(g):
    """exp(int g) - int exp(g - S^2/2)."""
    s = square_function(g)
    return float(math.exp(g.integral()) - np.mean(np.exp(g.leaves - 0.5 * s * s)))


def wolff_tail_check(g, lam):
    """(|{g - int g >= lam}|, exp(-lam^2 / (2 ||S||_inf^2)), measure <= bound)."""
    s_inf = float(np.max(square_function(g)))
    if not s_inf > 0:
        raise ValueError("square function vanishes identically")
    measure = float(np.mean(g.leaves - g.integral() >= lam))
    bound = math.exp(-0.5 * lam * lam / s_inf**2)
    return measure, bound, measure <= bound


def davis_ratio(g, p, s_p, rtol=1e-12):
    """Dyadic form of the two-sided Davis inequalities.

    p <= 2: ||g||_p <= s_p ||S g||_p;  p >= 2: s_p ||S g||_p <= ||g||_p.
    Returns (lhs, rhs, ok) with the inequality read as lhs <= rhs.
    """
    g_norm = float(np.mean(np.abs(g.leaves) ** p) ** (1 / p))
    s_norm = float(np.mean(square_function(g) ** p) ** (1 / p))
    if p <= 2:
        lhs, rhs = g_norm, s_p * s_norm
    else:
        lhs, rhs = s_p * s_norm, g_norm
    return lhs, rhs, lhs <= rhs * (1 + rtol)


def random_martingales(depth, count, seed, mean_zero=True):
    """Leaf arrays of shape (count, 2^depth).

    Level-n Haar coefficients are i.i.d. uniform on [-1, 1] scaled by
    2^(-gamma n) with one gamma ~ U(0, 1/2) per sample, so the samples range
    from flat to strongly front-loaded increments.
    """
    rng = np.random.default_rng(seed)
    size = 2**depth
    gamma = rng.uniform(0.0, 0.5, size=(count, 1))
    start = np.zeros((count, 1)) if mean_zero else rng.uniform(-1.0, 1.0, size=(count, 1))
    leaves = np.repeat(start, size, axis=1)
    for n in range(depth):
        coef = rng.uniform(-1.0, 1.0, size=(count, 2**n)) * 2.0 ** (-gamma * n)
        haar = np.repeat(np.stack([coef, -coef], axis=-1).reshape(count, 2 ** (n + 1)), size // 2 ** (n + 1), axis=1)
        leaves = leaves + haar
    return leaves


def orthogonality_defect(leaves):
    """int g^2 - (int g)^2 - int S^2 per sample (zero up to rounding)."""
    s = _batch_square(leaves)
    return np.mean(leaves**2, axis=-1) - np.mean(leaves, axis=-1) ** 2 - np.mean(s**2, axis=-1)


def master_bound_sweep(U_fn, depth=8, samples=10_000, seed=0, tol=1e-9):
    leaves = random_martingales(depth, samples, seed, mean_zero=False)
    s = _batch_square(leaves)
    ints = leaves.mean(axis=-1)
    gaps = U_fn(ints, np.zeros_like(ints)) - np.mean(U_fn(leaves, s), axis=-1)
    return summarize(gaps, [np.arange(samples)], tol, ("master_bound",))


def cww_sweep(depth=8, samples=10_000, seed=0, tol=1e-12):
    leaves = random_martingales(depth, samples, seed, mean_zero=False)
    s = _batch_square(leaves)
    gaps = np.exp(leaves.mean(axis=-1)) - np.mean(np.exp(leaves - 0.5 * s * s), axis=-1)
    return summarize(gaps, [np.arange(samples)], tol, ("cww",))


def davis_sweep(p, s_p, depth=8, samples=10_000, seed=0, rtol=1e-12):
    """Gap rhs - lhs (relative to rhs) of the Davis inequality per sample, plus
    the largest observed ||g||_p / ||S g||_p."""
    leaves = random_martingales(depth, samples, seed, mean_zero=True)
    s = _batch_square(leaves)
    g_norm = np.mean(np.abs(leaves) ** p, axis=-1) ** (1 / p)
    s_norm = np.mean(s**p, axis=-1) ** (1 / p)
    if p <= 2:
        lhs, rhs = g_norm, s_p * s_norm
    else:
        lhs, rhs = s_p * s_norm, g_norm
    report = summarize((rhs - lhs) / rhs, [np.arange(samples)], rtol, (f"davis_p{p:g}",))
    return report, float(np.max(g_norm / s_norm))


def wolff_sweep(lams=(0.5, 1.0, 2.0), depth=8, samples=10_000, seed=0):
    """Martingales normalised to ||S||_inf = 1; gap = bound - measure."""
    leaves = random_martingales(depth, samples, seed, mean_zero=True)
    s_inf = np.max(_batch_square(leaves), axis=-1, keepdims=True)
    leaves = leaves / s_inf
    cols = []
    for lam in lams:
        measure = np.mean(leaves >= lam, axis=-1)
        cols.append(math.exp(-0.5 * lam * lam) - measure)
    return summarize(np.column_stack(cols), [np.arange(samples)], 0.0, tuple(f"wolff_{lam:g}" for lam in lams))
