"""Special functions: the even Hermite-equation solution N_alpha and friends.

N_alpha(x) = 1F1(-alpha/2, 1/2, x^2/2) is evaluated by its power series in x^2.
It solves N'' - x N' + alpha N = 0 with N(0) = 1, N'(0) = 0, and its second
derivative obeys N''_alpha = -alpha N_{alpha-2}, which is how N'' is computed
here.  All evaluators accept scalars or numpy arrays.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError, ZeroNotFoundError

# Upper end of the expanding scan [1, 2, 4, ...] used for alpha < 2.
SCAN_LIMIT = 16.0
SQRT_PI_HALF = math.sqrt(math.pi) / 2


@dataclass(frozen=True)
class SeriesConfig:
    rel_tol: float = 1e-14
    max_terms: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 10:
            raise ValueError("max_terms must be at least 10")


DEFAULT_SERIES = SeriesConfig()


@dataclass(frozen=True)
class ZeroBracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0 < self.lo < self.hi):
            raise ValueError(f"invalid bracket [{self.lo}, {self.hi}]")


def _series(alpha, x, cfg):
    """Return (N, N') for array ``x`` by summing the series term by term.

    Terms are added until |term| <= rel_tol * |partial sum| holds for three
    consecutive terms (for both N and N') and the index exceeds x^2; elements
    that have converged are frozen so array and scalar evaluation agree.
    """
    x = np.asarray(x, dtype=float)
    x2 = x * x
    half = alpha / 2.0
    term = np.ones_like(x)
    total = np.ones_like(x)
    dtotal = np.zeros_like(x)  # sum of 2m * term_m, equals x * N'(x)
    streak = np.zeros(x.shape, dtype=int)
    active = np.ones(x.shape, dtype=bool)
    for m in range(cfg.max_terms):
        term = np.where(active, term * (-2.0 * x2) * (half - m) / ((2 * m + 1) * (2 * m + 2)), term)
        k = m + 1
        dterm = 2 * k * term
        total = np.where(active, total + term, total)
        dtotal = np.where(active, dtotal + dterm, dtotal)
        small = (np.abs(term) <= cfg.rel_tol * np.abs(total)) & (
            np.abs(dterm) <= cfg.rel_tol * np.abs(dtotal)
        )
        streak = np.where(small, streak + 1, 0)
        active &= ~((streak >= 3) & (k > x2))
        if not active.any():
            break
    else:
        raise TruncationError(
            f"N_{alpha} series did not converge within {cfg.max_terms} terms",
            partial_sum=total,
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        deriv = np.where(x == 0, 0.0, dtotal / np.where(x == 0, 1.0, x))
    return total, deriv


def _out(arr, scalar):
    return float(arr) if scalar else arr


def eval_N(alpha, x, cfg=DEFAULT_SERIES):
    """Return ``(N, N', N'')`` of N_alpha at ``x``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    scalar = np.ndim(x) == 0
    n, dn = _series(alpha, x, cfg)
    ddn = -alpha * _series(alpha - 2.0, x, cfg)[0]
    return _out(n, scalar), _out(dn, scalar), _out(ddn, scalar)


def eval_N_value(alpha, x, cfg=DEFAULT_SERIES):
    """N_alpha(x) alone; also valid for alpha <= 0 (used for N_{alpha-2})."""
    return _out(_series(alpha, x, cfg)[0], np.ndim(x) == 0)


def eval_N_and_slope(alpha, x, cfg=DEFAULT_SERIES):
    scalar = np.ndim(x) == 0
    n, dn = _series(alpha, x, cfg)
    return _out(n, scalar), _out(dn, scalar)


def eval_N_termwise(alpha, x):
    """Reference evaluation of (N, N', N'') by a fixed 200-term sum with
    term-wise double differentiation; only used to cross-check ``eval_N``."""
    x = float(x)
    coeff = 1.0
    n = dn = ddn = 0.0
    for m in range(200):
        if m > 0:
            coeff *= -2.0 * (alpha / 2.0 - (m - 1)) / ((2 * m - 1) * (2 * m))
        if coeff == 0.0:
            break
        n += coeff * x ** (2 * m)
        if m >= 1:
            dn += coeff * 2 * m * x ** (2 * m - 1)
            ddn += coeff * 2 * m * (2 * m - 1) * x ** (2 * m - 2)
    return n, dn, ddn


def _scan_step(alpha):
    return min(0.01, math.sqrt(2.0 / alpha) / 10.0)


def _first_sign_change(alpha, lo, hi, step, cfg):
    """Scan [lo, hi] on a grid and return the first bracket with a sign change
    (or an exact zero as a degenerate bracket), else None."""
    count = max(2, int(math.ceil((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, count)
    vals = eval_N_value(alpha, grid, cfg)
    exact = np.flatnonzero(vals == 0.0)
    change = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    first_exact = exact[0] if exact.size else None
    first_change = change[0] if change.size else None
    if first_exact is not None and (first_change is None or first_exact <= first_change):
        return float(grid[first_exact]), float(grid[first_exact])
    if first_change is not None:
        return float(grid[first_change]), float(grid[first_change + 1])
    return None


def _bisect(alpha, lo, hi, tol, cfg):
    flo = eval_N_value(alpha, lo, cfg)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fmid = eval_N_value(alpha, mid, cfg)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_bracket(alpha, cfg=DEFAULT_SERIES):
    """Locate the first sign change of N_alpha on the positive axis.

    For alpha >= 2 the scan covers [0, 1]; for alpha < 2 it continues through
    the doubling brackets [1, 2], [2, 4], ... up to ``SCAN_LIMIT``.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    step = _scan_step(alpha)
    found = _first_sign_change(alpha, 0.0, 1.0, step, cfg)
    lo = 1.0
    while found is None and alpha < 2 and lo < SCAN_LIMIT:
        found = _first_sign_change(alpha, lo, 2 * lo, step, cfg)
        lo *= 2
    if found is None:
        limit = 1.0 if alpha >= 2 else SCAN_LIMIT
        raise ZeroNotFoundError(f"no sign change of N_{alpha} on (0, {limit}]")
    return found


def smallest_zero(alpha, cfg=DEFAULT_SERIES, tol=1e-13):
    """Smallest positive zero s_alpha of N_alpha."""
    lo, hi = find_bracket(alpha, cfg)
    if lo == hi:
        return lo
    return _bisect(alpha, lo, hi, tol, cfg)


def hermite_poly(m, x):
    """Probabilists' Hermite polynomial He_m(x) via the three-term recurrence."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x.copy()
    if m == 0:
        cur = prev
    for k in range(1, m):
        prev, cur = cur, x * cur - k * prev
    return float(cur) if cur.ndim == 0 else cur


def hermite_smallest_root(m, tol=1e-14):
    """Smallest positive root of He_m by scan + bisection (m >= 2)."""
    grid = np.linspace(0.0, math.sqrt(4 * m + 2), 4000 * m)
    vals = hermite_poly(m, grid)
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    lo, hi = grid[idx], grid[idx + 1]
    flo = hermite_poly(m, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = hermite_poly(m, mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gamma_fn(x):
    """Gamma function for x > 0 (backed by ``math.gamma``)."""
    if not x > 0:
        raise ValueError(f"gamma_fn domain is x > 0, got {x}")
    return math.gamma(x)


def solve_p0(tol=1e-12):
    """The root p0 in (1, 2) of Gamma((p+1)/2) = sqrt(pi)/2.

    The equation also holds at p = 2, so bisection runs on [1.5, 1.9] where
    the left end is above and the right end below sqrt(pi)/2.
    """
    lo, hi = 1.5, 1.9
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gamma_fn((mid + 1) / 2) > SQRT_PI_HALF:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
