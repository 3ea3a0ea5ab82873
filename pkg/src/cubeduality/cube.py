"""Functions on the Hamming cube {-1, 1}^n.

A function is stored as a vector of 2^n values indexed by a vertex bitmask:
bit j of the index is set iff x_j = +1.  Batched helpers take arrays whose
last axis has length 2^n, which is how the random sweeps are vectorised.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .bellman import summarize
from .duality import dual_M
from .errors import DimensionError
from .specfun import gamma_fn, smallest_zero

MAX_DIM = 20
RADEMACHER_MAX_DIM = 12
SEARCH_MAX_DIM = 6
SIGMA_MAX_DIM = 4
DENOMINATOR_FLOOR = 1e-8
LOG_RATIO_CAP = 1e6


@lru_cache(maxsize=None)
def s_alpha(alpha):
    """Cached smallest zero s_alpha."""
    return smallest_zero(alpha)


def conjugate(p):
    return math.inf if p == 1 else p / (p - 1)


def s_conj(p):
    """s_{p'} for p in [1, 2]; the p = 1 endpoint is the limit value 0."""
    if p == 1:
        return 0.0
    return s_alpha(conjugate(p))


@dataclass(frozen=True, eq=False)
class CubeFunction:
    n: int
    values: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise DimensionError(f"n must be in [1, {MAX_DIM}], got {self.n}")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (2**self.n,):
            raise ValueError(f"expected {2 ** self.n} values, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, n, fn):
        return cls(n, np.array([fn(vertex(n, m)) for m in range(2**n)], dtype=float))

    def __add__(self, other):
        return CubeFunction(self.n, self.values + other.values)

    def __mul__(self, c):
        return CubeFunction(self.n, c * self.values)

    __rmul__ = __mul__


def vertex(n, m):
    """Coordinates (x_1, ..., x_n) of the vertex with mask ``m``."""
    return np.array([1.0 if (m >> j) & 1 else -1.0 for j in range(n)])


def vertices(n):
    """(2^n, n) array of coordinates, row m is the vertex with mask m."""
    m = np.arange(2**n)[:, None]
    return np.where((m >> np.arange(n)) & 1, 1.0, -1.0)


def dictator(n, j=0):
    return CubeFunction(n, vertices(n)[:, j])


def _check_axis(n, j):
    if not 0 <= j < n:
        raise IndexError(f"axis {j} out of range for n={n}")


def partial_derivative(f, j):
    _check_axis(f.n, j)
    idx = np.arange(2**f.n)
    return CubeFunction(f.n, 0.5 * (f.values - f.values[idx ^ (1 << j)]))


def batch_partials(values, n):
    """(..., 2^n) -> (..., n, 2^n) array of half-differences."""
    idx = np.arange(2**n)
    return np.stack([0.5 * (values - values[..., idx ^ (1 << j)]) for j in range(n)], axis=-2)


def batch_gradient_norm(values, n):
    return np.sqrt(np.sum(batch_partials(values, n) ** 2, axis=-2))


def gradient_norm(f):
    return CubeFunction(f.n, batch_gradient_norm(f.values, f.n))


def expectation(f):
    return float(np.mean(f.values))


def pnorm(f, p):
    if not p > 0:
        raise ValueError("p must be positive")
    return float(np.mean(np.abs(f.values) ** p) ** (1 / p))


def permute_axes(f, perm):
    """Relabel coordinates: the result g satisfies g(x) = f(y) with
    y_{perm[j]} = x_j."""
    idx = np.arange(2**f.n)
    src = np.zeros_like(idx)
    for j, pj in enumerate(perm):
        src |= ((idx >> j) & 1) << pj
    return CubeFunction(f.n, f.values[src])


def average_axis(f, j):
    """E_{x_j} f as a function on the full cube (constant along axis j)."""
    _check_axis(f.n, j)
    idx = np.arange(2**f.n)
    return CubeFunction(f.n, 0.5 * (f.values + f.values[idx ^ (1 << j)]))


# ---------------------------------------------------------------------------
# Poincare-type inequalities
# ---------------------------------------------------------------------------


def _lp_poincare_gaps(values, n, p, s):
    grad = batch_gradient_norm(values, n)
    lhs = np.mean(grad**p, axis=-1) ** (1 / p)
    var = np.mean(np.abs(values) ** p, axis=-1) - np.abs(np.mean(values, axis=-1)) ** p
    return lhs - s * np.maximum(var, 0.0) ** (1 / p)


def lp_poincare_gap(f, p, s):
    """(E|grad f|^p)^{1/p} - s (E|f|^p - |Ef|^p)^{1/p}; s should be s_{p'}."""
    return float(_lp_poincare_gaps(f.values, f.n, p, s))


def rademacher_constant(p, s):
    return s**p * 2 ** ((p - 2) / 2) * min(1.0, gamma_fn((p + 1) / 2) / gamma_fn(1.5))


def _rademacher_gaps(values, n, p, s):
    if n > RADEMACHER_MAX_DIM:
        raise DimensionError(f"rademacher_gap enumerates 4^n terms; n <= {RADEMACHER_MAX_DIM}")
    parts = batch_partials(values, n)  # (..., n, 2^n)
    signs = vertices(n)  # (2^n, n)
    sums = np.einsum("...jx,yj->...xy", parts, signs)
    lhs = np.mean(np.abs(sums) ** p, axis=(-2, -1))
    centred = values - np.mean(values, axis=-1, keepdims=True)
    return lhs - rademacher_constant(p, s) * np.mean(np.abs(centred) ** p, axis=-1)


def rademacher_gap(f, p, s):
    """E_x E_x' |sum_j x'_j d_j f(x)|^p minus the Khinchin-type lower bound."""
    return float(_rademacher_gaps(f.values, f.n, p, s))


def random_functions(n, count, seed):
    """``count`` functions with i.i.d. standard normal values (PCG64 stream)."""
    return np.random.default_rng(seed).standard_normal((count, 2**n))


def lp_poincare_sweep(n, p, samples=10_000, seed=0, tol=1e-9):
    vals = random_functions(n, samples, seed)
    gaps = _lp_poincare_gaps(vals, n, p, s_conj(p))
    return summarize(gaps, [np.arange(samples)], tol, ("lp_poincare",))


def rademacher_sweep(n, p, samples=10_000, seed=0, tol=1e-9, chunk=2_000):
    vals = random_functions(n, samples, seed)
    s = s_conj(p)
    gaps = np.concatenate([_rademacher_gaps(vals[i : i + chunk], n, p, s) for i in range(0, samples, chunk)])
    return summarize(gaps, [np.arange(samples)], tol, ("rademacher",))


def power_tangent_gap(x, p):
    """2|x-1|^p - |x|^p + 1 - p(1-x)."""
    x = np.asarray(x, dtype=float)
    g = 2 * np.abs(x - 1) ** p - np.abs(x) ** p + 1 - p * (1 - x)
    return float(g) if g.ndim == 0 else g


# ---------------------------------------------------------------------------
# best constant search
# ---------------------------------------------------------------------------


def sobolev_ratio(values, n, p):
    """E|grad f|^p / (E|f|^p - |Ef|^p); +inf on (near-)constants."""
    values = np.asarray(values, dtype=float)
    mom = np.mean(np.abs(values) ** p)
    den = mom - abs(np.mean(values)) ** p
    if not den > DENOMINATOR_FLOOR * mom:
        return math.inf
    return float(np.mean(batch_gradient_norm(values, n) ** p) / den)


def affine_family_ratio(p, a):
    """Ratio for f = 1 + a x_1 on the one-dimensional cube, no floor applied."""
    vals = np.array([1 - a, 1 + a])
    den = np.mean(np.abs(vals) ** p) - abs(np.mean(vals)) ** p
    return abs(a) ** p / den


def _coordinate_descent(v, n, p, sweeps, rtol=1e-10):
    v = np.array(v, dtype=float)
    best = sobolev_ratio(v, n, p)
    for _ in range(sweeps):
        start = best
        for i in range(v.size):
            width = 2.0 * (np.ptp(v) + 1e-3)

            def obj(t):
                w = v.copy()
                w[i] = t
                r = sobolev_ratio(w, n, p)
                # finite stand-ins keep Brent's parabolic steps well defined
                return math.log(r) if r > 0 and math.isfinite(r) else (LOG_RATIO_CAP if r > 0 else -LOG_RATIO_CAP)

            res = minimize_scalar(obj, bounds=(v[i] - width, v[i] + width), method="bounded", options={"xatol": 1e-10})
            cand = v.copy()
            cand[i] = res.x
            r = sobolev_ratio(cand, n, p)
            if r < best:
                v, best = cand, r
        v = v / np.mean(np.abs(v) ** p) ** (1 / p)
        if not best < start * (1 - rtol):
            break
    return best, v


def best_constant_search(n, p, restarts=4, seed=0, sweeps=30):
    """Numerical upper estimate of the best constant c_p(n).

    Starts: a dictator, the family 1 + a x_1 for a = 10^-1 ... 10^-5 and
    ``restarts`` standard-normal vectors; each is improved by coordinate
    descent on the log ratio.  Returns (estimate, witness).
    """
    if n > SEARCH_MAX_DIM:
        raise DimensionError(f"best_constant_search supports n <= {SEARCH_MAX_DIM}")
    rng = np.random.default_rng(seed)
    starts = [dictator(n).values]
    x1 = vertices(n)[:, 0]
    starts += [1 + 10.0**-k * x1 for k in range(1, 6)]
    starts += [rng.standard_normal(2**n) for _ in range(restarts)]
    best, witness = math.inf, None
    for v0 in starts:
        if not math.isfinite(sobolev_ratio(v0, n, p)):
            continue
        r, v = _coordinate_descent(v0, n, p, sweeps)
        if r < best:
            best, witness = r, v
    return best, CubeFunction(n, witness)


# ---------------------------------------------------------------------------
# surface measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CubeSubset:
    n: int
    membership: np.ndarray

    def __post_init__(self):
        mem = np.asarray(self.membership, dtype=bool)
        if mem.shape != (2**self.n,):
            raise ValueError("membership must have length 2^n")
        object.__setattr__(self, "membership", mem)

    @property
    def cardinality(self):
        return int(np.count_nonzero(self.membership))

    @property
    def mask(self):
        return sum(1 << int(i) for i in np.flatnonzero(self.membership))

    @classmethod
    def from_mask(cls, n, mask):
        return cls(n, np.array([(mask >> i) & 1 for i in range(2**n)], dtype=bool))

    @classmethod
    def from_vertices(cls, n, masks):
        mem = np.zeros(2**n, dtype=bool)
        mem[list(masks)] = True
        return cls(n, mem)

    def indicator(self):
        """The +-1 valued function: +1 on the set, -1 off it."""
        return CubeFunction(self.n, np.where(self.membership, 1.0, -1.0))


def _weights(membership, n):
    idx = np.arange(2**n)
    return sum((membership != membership[..., idx ^ (1 << j)]).astype(int) for j in range(n))


def surface_weight(A):
    """w_A(x): number of cube edges at x with exactly one endpoint in A."""
    return CubeFunction(A.n, _weights(A.membership, A.n).astype(float))


@lru_cache(maxsize=None)
def _half_subsets(n):
    size = 2**n
    combos = np.array(list(itertools.combinations(range(size), size // 2)), dtype=np.int64)
    mem = np.zeros((len(combos), size), dtype=bool)
    mem[np.arange(len(combos))[:, None], combos] = True
    masks = np.array([sum(1 << int(i) for i in row) for row in combos], dtype=object)
    return mem, _weights(mem, n), masks


def sigma_exhaustive(n, p, tie_tol=1e-12):
    """Exact min of E w_A^{p/2} over |A| = 2^{n-1}; ties go to the smallest
    membership bitmask."""
    if n > SIGMA_MAX_DIM:
        raise DimensionError(f"sigma_exhaustive supports n <= {SIGMA_MAX_DIM}")
    mem, w, masks = _half_subsets(n)
    vals = np.mean(w.astype(float) ** (p / 2), axis=1)
    best = vals.min()
    tied = np.flatnonzero(vals <= best + tie_tol)
    pick = min(tied, key=lambda i: masks[i])
    return float(best), CubeSubset(n, mem[pick])


def sigma_lower_bound(p):
    return max(math.sqrt(2 / math.pi), s_conj(p) ** p)


# ---------------------------------------------------------------------------
# the cube induction
# ---------------------------------------------------------------------------


def induction_step_gap(f, ctx, j):
    """min over vertices of M(E_j f, |grad E_j f|) - E_j M(f, |grad f|)."""
    _check_axis(f.n, j)
    g = average_axis(f, j)
    mf = dual_M(ctx, f.values, gradient_norm(f).values)
    mg = dual_M(ctx, g.values, gradient_norm(g).values)
    idx = np.arange(2**f.n)
    return float(np.min(mg - 0.5 * (mf + mf[idx ^ (1 << j)])))


def global_dual_gap(f, ctx):
    """M(Ef, 0) - E M(f, |grad f|)."""
    return float(dual_M(ctx, expectation(f), 0.0) - np.mean(dual_M(ctx, f.values, gradient_norm(f).values)))
