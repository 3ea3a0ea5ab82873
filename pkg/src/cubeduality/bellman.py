"""Davis' Bellman function U(p, q) and its pointwise properties.

For alpha >= 2 with conjugate beta = alpha / (alpha - 1), let s = s_alpha and

    u(x) = c * N_alpha(x)      for |x| <  s,   c = -alpha s^(alpha-1) / N'_alpha(s)
    u(x) = s^alpha - |x|^alpha for |x| >= s

and U(p, q) = |q|^alpha u(p / |q|), U(p, 0) = -|p|^alpha.  The gap functions
below return quantities that are nonnegative exactly when the corresponding
inequality holds, so a sweep reduces to taking a minimum.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProximityError
from .specfun import DEFAULT_SERIES, eval_N, eval_N_and_slope, eval_N_value, smallest_zero

CURVE_MARGIN = 1e-3


@dataclass(frozen=True)
class AlphaContext:
    alpha: float
    beta: float
    s: float
    c_norm: float
    slope_at_s: float  # N'_alpha(s) < 0
    relaxed: bool = False

    @property
    def s_pow(self):
        return self.s**self.alpha


def make_context(alpha, relaxed=False, cfg=DEFAULT_SERIES):
    """Build a validated :class:`AlphaContext`.

    ``relaxed=True`` admits 0 < alpha < 2 (Davis constants only); the
    concavity-related invariants are then not checked.
    """
    if relaxed:
        if not alpha > 0:
            raise ValueError("alpha must be positive")
    elif not alpha >= 2:
        raise ValueError(f"alpha must be >= 2, got {alpha}")
    s = smallest_zero(alpha, cfg)
    n_s, dn_s = eval_N_and_slope(alpha, s, cfg)
    if abs(n_s) > 1e-10:
        raise ValueError(f"|N_alpha(s)| = {abs(n_s):.3g} too large")
    if not dn_s < 0:
        raise ValueError("N'_alpha(s_alpha) must be negative")
    c = -alpha * s ** (alpha - 1) / dn_s
    beta = alpha / (alpha - 1) if alpha != 1 else math.inf
    if not relaxed:
        assert 1 < beta <= 2 and 0 < s <= 1 and c > 0
    return AlphaContext(alpha=alpha, beta=beta, s=s, c_norm=c, slope_at_s=dn_s, relaxed=relaxed)


def _wrap(arr, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(arr)
    return arr


def u_alpha(ctx, x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inner = ax < ctx.s
    out = ctx.s_pow - ax**ctx.alpha
    if inner.any():
        out = out.copy() if out.ndim else out
        out = np.where(inner, ctx.c_norm * eval_N_value(ctx.alpha, np.where(inner, ax, 0.0)), out)
    return _wrap(out, x)


def U(ctx, p, q):
    """Bellman function; even in both arguments, homogeneous of degree alpha."""
    p, q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    ap, aq = np.abs(p), np.abs(q)
    a = ctx.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(aq > 0, ap / np.where(aq > 0, aq, 1.0), np.inf)
    inner = z < ctx.s
    # outer branch written without dividing by q so the obstacle difference is exact
    out = ctx.s_pow * aq**a - ap**a
    if inner.any():
        zi = z[inner]
        out = np.array(out, copy=True)
        out[inner] = ctx.c_norm * eval_N_value(a, zi) * aq[inner] ** a
    return _wrap(out, p, q)


def obstacle(ctx, p, q):
    return ctx.s_pow * np.abs(q) ** ctx.alpha - np.abs(p) ** ctx.alpha


def obstacle_gap(ctx, p, q):
    return _wrap(U(ctx, p, q) - obstacle(ctx, np.asarray(p, float), np.asarray(q, float)), p, q)


def main_inequality_gap(ctx, p, q, a):
    """2U(p,q) - U(p+a, sqrt(a^2+q^2)) - U(p-a, sqrt(a^2+q^2))."""
    p, q, a = (np.asarray(v, dtype=float) for v in (p, q, a))
    r = np.hypot(a, q)
    return _wrap(2 * U(ctx, p, q) - U(ctx, p + a, r) - U(ctx, p - a, r), p, q, a)


def convexity_in_t_gap(ctx, p, t1, t2):
    """Midpoint convexity defect of t -> U(p, sqrt(t))."""
    p, t1, t2 = (np.asarray(v, dtype=float) for v in (p, t1, t2))
    mid = U(ctx, p, np.sqrt(0.5 * (t1 + t2)))
    return _wrap(0.5 * U(ctx, p, np.sqrt(t1)) + 0.5 * U(ctx, p, np.sqrt(t2)) - mid, p, t1, t2)


def heat_residual(ctx, p, t, margin=CURVE_MARGIN):
    """u_t + u_pp / 2 for u(p, t) = U(p, sqrt(t)), from closed-form branch
    derivatives.  Zero where |p| < s sqrt(t), nonpositive outside."""
    p, t = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    a, s = ctx.alpha, ctx.s
    z = np.abs(p) / np.sqrt(t)
    if np.any(np.abs(z - s) < margin * s):
        raise ProximityError("point within the excluded margin of |p|/sqrt(t) = s_alpha")
    inner = z < s
    # outer: u = s^a t^(a/2) - |p|^a
    res = 0.5 * a * (s**a * t ** (a / 2 - 1) - (a - 1) * np.abs(p) ** (a - 2))
    if inner.any():
        zi, ti = z[inner], t[inner]
        n, dn, ddn = eval_N(a, zi)
        u_t = ctx.c_norm * ti ** (a / 2 - 1) * (0.5 * a * n - 0.5 * zi * dn)
        u_pp = ctx.c_norm * ti ** (a / 2 - 1) * ddn
        res = np.array(res, copy=True)
        res[inner] = u_t + 0.5 * u_pp
    return _wrap(res, p, t)


def heat_residual_fd(ctx, p, t, h=None):
    """Central finite-difference version of :func:`heat_residual` (cross-check)."""
    hp = 1e-5 * (1 + abs(p)) if h is None else h
    ht = 1e-5 * (1 + abs(t)) if h is None else h
    ht = min(ht, 0.5 * t)

    def ut(pp, tt):
        return U(ctx, pp, math.sqrt(tt))

    d_t = (ut(p, t + ht) - ut(p, t - ht)) / (2 * ht)
    d_pp = (ut(p + hp, t) - 2 * ut(p, t) + ut(p - hp, t)) / hp**2
    return d_t + 0.5 * d_pp


@dataclass(frozen=True)
class GridSpec:
    """Per-axis ``(min, max, count)`` triples keyed by variable name."""

    axes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        for name, (lo, hi, count) in self.axes.items():
            if count < 2 or not lo < hi:
                raise ValueError(f"bad axis {name}: {(lo, hi, count)}")

    def mesh(self):
        """Flattened coordinates, C order over axes (last axis fastest)."""
        ticks = [np.linspace(lo, hi, count) for lo, hi, count in self.axes.values()]
        grids = np.meshgrid(*ticks, indexing="ij")
        return {name: g.ravel() for name, g in zip(self.axes, grids)}

    @property
    def n_cells(self):
        return int(np.prod([c for _, _, c in self.axes.values()]))


@dataclass
class ViolationReport:
    worst_gap: float
    worst_location: tuple
    n_checked: int
    n_violations: int
    tol: float
    worst_check: str = ""

    @property
    def ok(self):
        return self.n_violations == 0


def summarize(gaps, locations, tol, checks=None):
    """Reduce a 2-D ``(cells, checks)`` gap array into a report.

    ``locations`` is a list of coordinate arrays aligned with the cells; ties
    in the minimum go to the lowest (cell, check) index.
    """
    gaps = np.asarray(gaps, dtype=float)
    if gaps.ndim == 1:
        gaps = gaps[:, None]
    flat = gaps.ravel()
    idx = int(np.argmin(flat))
    cell, check = divmod(idx, gaps.shape[1])
    return ViolationReport(
        worst_gap=float(flat[idx]),
        worst_location=tuple(float(loc[cell]) for loc in locations),
        n_checked=int(flat.size),
        n_violations=int(np.count_nonzero(flat < -tol)),
        tol=tol,
        worst_check=checks[check] if checks else "",
    )


BELLMAN_CHECKS = ("obstacle", "main_inequality", "t_convexity")


def bellman_gaps(ctx, p, q, a):
    """Gap matrix for the three pointwise checks at cells (p, q, a).

    The t-convexity check uses the pair t1 = q^2, t2 = q^2 + a^2, which is the
    pair of heights appearing in the main inequality.
    """
    return np.column_stack(
        [
            obstacle_gap(ctx, p, q),
            main_inequality_gap(ctx, p, q, a),
            convexity_in_t_gap(ctx, p, q * q, q * q + a * a),
        ]
    )


def verify_bellman_grid(ctx, grid, tol=1e-9):
    """Sweep obstacle, main inequality and t-convexity over a (p, q, a) grid."""
    pts = grid.mesh()
    p, q, a = pts["p"], pts["q"], pts["a"]
    return summarize(bellman_gaps(ctx, p, q, a), [p, q, a], tol, BELLMAN_CHECKS)


def acceptance_grid(count=50):
    """The (p, q, a) in [-3,3] x (0,3] x [-3,3] grid; q starts one step above 0."""
    return GridSpec({"p": (-3.0, 3.0, count), "q": (3.0 / count, 3.0, count), "a": (-3.0, 3.0, count)})
