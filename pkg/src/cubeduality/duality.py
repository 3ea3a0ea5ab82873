"""Min-sup dualization of square-function Bellman functions.

    M(x, y) = min_{q <= 0} sup_p ( p x + q y + U(p, q) )

turns a function satisfying the square-function main inequality into one
satisfying the Hamming-cube inequality

    2 M(x, y) >= M(x + a, sqrt(a^2 + (y+b)^2)) + M(x - a, sqrt(a^2 + (y-b)^2)).

Two routes compute M.  :func:`saddle_solve` is a generic nested 1-D solver for
any concave-convex potential.  :func:`dual_M` exploits the homogeneity of the
Davis function: the inner sup is a concave conjugate of u_alpha and the outer
stationarity condition collapses to one monotone equation in z = p / |q|,

    y / |x| = z - alpha N(z) / N'(z),     0 < z < s,

so M is obtained from a single vectorised bisection.  The two routes are
independent and are checked against each other in the tests.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .bellman import U as davis_U
from .errors import CoercivityError, ConvexityError
from .specfun import eval_N_and_slope

MAX_HALF_WIDTH = 2.0**40
AXIS_RATIO = 1e-9


@dataclass(frozen=True)
class Potential:
    """A map (p, q) -> real, concave in p on ``p_domain`` and convex in q on
    ``q_domain`` (a subset of q <= 0), coercive around ``witness``."""

    fn: object
    p_domain: tuple = (-math.inf, math.inf)
    q_domain: tuple = (-math.inf, 0.0)
    witness: tuple = (0.0, 0.0)
    name: str = ""

    def __call__(self, p, q):
        return self.fn(p, q)

    def spot_check(self, rng, n=100, box=2.0, tol=1e-9):
        """Random three-point midpoint tests of concavity in p / convexity in q."""
        plo, phi = max(self.p_domain[0], -box), min(self.p_domain[1], box)
        qlo, qhi = max(self.q_domain[0], -box), min(self.q_domain[1], box)
        for _ in range(n):
            p1, p2, pc = rng.uniform(plo, phi, size=3)
            q1, q2, qc = rng.uniform(qlo, qhi, size=3)
            dp = self.fn(0.5 * (p1 + p2), qc) - 0.5 * (self.fn(p1, qc) + self.fn(p2, qc))
            dq = 0.5 * (self.fn(pc, q1) + self.fn(pc, q2)) - self.fn(pc, 0.5 * (q1 + q2))
            scale = tol * (1 + abs(self.fn(pc, qc)))
            if dp < -scale:
                raise ConvexityError(f"{self.name or 'potential'} not concave in p near p={p1:.3g},{p2:.3g}")
            if dq < -scale:
                raise ConvexityError(f"{self.name or 'potential'} not convex in q near q={q1:.3g},{q2:.3g}")
        return True


@dataclass
class SaddleResult:
    p_star: float
    q_star: float
    value: float
    gap: float
    iterations: int = 0
    info: dict = field(default_factory=dict)


def _maximize_1d(f, lo, hi, xatol, counter):
    """Maximize a concave function of one variable over [lo, hi] (either end
    may be infinite).  Returns (argmax, max)."""

    def g(t):
        counter[0] += 1
        try:
            v = f(t)
        except OverflowError as exc:
            raise CoercivityError(f"objective overflows near {t:.6g}") from exc
        if math.isnan(v) or v == math.inf:
            raise CoercivityError(f"objective is unbounded above near {t:.6g}")
        return v

    c0 = min(max(0.0, lo), hi)
    fc = g(c0)
    ends = []
    for direction, bound in ((1.0, hi), (-1.0, lo)):
        prev_v = fc
        h = 1.0
        while True:
            t = c0 + direction * h
            if (direction > 0 and t >= bound) or (direction < 0 and t <= bound):
                ends.append(bound)
                break
            v = g(t)
            if v <= prev_v:
                ends.append(t)
                break
            prev_v = v
            h *= 2.0
            if h > MAX_HALF_WIDTH:
                raise CoercivityError("bracket expansion limit exceeded")
    b, a = ends
    if a == b:
        return a, fc
    # discrete concavity on a coarse sample; an interior dip means the
    # objective is not unimodal and the bracket cannot be trusted
    ts = np.linspace(a, b, 9)
    vs = np.array([g(t) for t in ts])
    fin = np.isfinite(vs)
    if fin.all():
        second = vs[:-2] - 2 * vs[1:-1] + vs[2:]
        if np.any(second > 1e-9 * (1 + np.max(np.abs(vs)))):
            raise ConvexityError("objective is not concave on the bracket")
    res = minimize_scalar(lambda t: -g(t), bounds=(a, b), method="bounded", options={"xatol": xatol})
    cands = [(float(res.x), -float(res.fun))]
    cands += [(float(t), float(v)) for t, v in zip(ts, vs) if np.isfinite(v)]
    return max(cands, key=lambda tv: tv[1])


def _minimize_1d(f, lo, hi, xatol, counter):
    t, v = _maximize_1d(lambda s: -f(s), lo, hi, xatol, counter)
    return t, -v


def saddle_solve(pot, x, y, tol=1e-9, with_gap=True):
    """Solve min_{q in Q} sup_{p in P} (p x + q y + pot(p, q)).

    The inner concave maximization runs at a tenth of the outer tolerance.
    With ``with_gap`` the maximin value is computed as well and the difference
    is reported as ``gap``.
    """
    if y < 0:
        raise ValueError("y must be nonnegative")
    counter = [0]
    xatol_out = max(math.sqrt(tol) * 1e-2, 1e-12)
    xatol_in = xatol_out / 10

    def psi(p, q):
        return p * x + q * y + pot(p, q)

    def phi(q):
        return _maximize_1d(lambda p: psi(p, q), *pot.p_domain, xatol_in, counter)[1]

    q_star, value = _minimize_1d(phi, *pot.q_domain, xatol_out, counter)
    p_star = _maximize_1d(lambda p: psi(p, q_star), *pot.p_domain, xatol_in, counter)[0]
    gap = 0.0
    maximin = None
    if with_gap:

        def chi(p):
            try:
                return _minimize_1d(lambda q: psi(p, q), *pot.q_domain, xatol_in, counter)[1]
            except CoercivityError:
                return -math.inf

        maximin = _maximize_1d(chi, *pot.p_domain, xatol_out, counter)[1]
        gap = abs(value - maximin)
    return SaddleResult(
        p_star=p_star, q_star=q_star, value=value, gap=gap, iterations=counter[0], info={"maximin": maximin}
    )


def psi_value(pot, p, q, x, y):
    return p * x + q * y + pot(p, q)


def davis_potential(ctx):
    return Potential(fn=lambda p, q: davis_U(ctx, p, q), name=f"davis(alpha={ctx.alpha:g})")


# ---------------------------------------------------------------------------
# structured solver for the Davis function
# ---------------------------------------------------------------------------


def _k_of_z(ctx, z):
    n, dn = eval_N_and_slope(ctx.alpha, z)
    return z - ctx.alpha * n / dn, n, dn


def _solve_z(ctx, kappa):
    """Solve z - alpha N(z)/N'(z) = kappa on (0, s) for kappa > s (vectorised).

    The left side decreases from +inf to s and behaves like 1/z near 0, so a
    lower bracket 0.25/kappa is tried first and the bisection is geometric;
    that keeps huge kappa (tiny |x|) as cheap as moderate ones.
    """
    kappa = np.asarray(kappa, dtype=float)
    hi = np.full_like(kappa, ctx.s)
    with np.errstate(divide="ignore", over="ignore"):
        guess = np.minimum(0.25 / kappa, 0.5 * ctx.s)
    lo = np.where(_k_of_z(ctx, np.maximum(guess, 1e-300))[0] > kappa, guess, 0.0)
    for _ in range(400):
        mid = np.where(lo > 0, np.sqrt(lo * hi), 0.5 * (lo + hi))
        k, _, _ = _k_of_z(ctx, np.maximum(mid, 1e-300))
        above = k > kappa
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= 2 * np.spacing(hi)):
            break
    return 0.5 * (lo + hi)


def dual_saddle(ctx, x, y):
    """Vectorised (p*, q*, M) for the Davis potential.

    Regions: y = 0 (q* = 0); y <= s|x| where the saddle sits on the outer
    branch and M equals the obstacle lower bound; y > s|x| (inner branch).
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise ValueError("y must be nonnegative")
    a, beta, s, c = ctx.alpha, ctx.beta, ctx.s, ctx.c_norm
    ax = np.abs(x)
    sgn = np.where(x < 0, -1.0, 1.0)
    k = (a - 1) / a**beta
    p_out = sgn * (ax / a) ** (1 / (a - 1))

    M = np.empty(x.shape)
    p_star = np.empty(x.shape)
    q_star = np.empty(x.shape)

    outer = y <= s * ax
    M[outer] = k * (ax[outer] ** beta - (y[outer] / s) ** beta)
    p_star[outer] = p_out[outer]
    q_star[outer] = -((y[outer] / (a * s**a)) ** (1 / (a - 1)))

    # M(x, y) - M(0, y) is O(x^2 / y^2) relative; below AXIS_RATIO that is
    # under double precision and the inner equation would underflow
    axis = (~outer) & (ax <= AXIS_RATIO * y)
    r0 = (y[axis] / (a * c)) ** (1 / (a - 1))
    M[axis] = -r0 * y[axis] + c * r0**a
    p_star[axis] = 0.0
    q_star[axis] = -r0

    inner = (~outer) & ~axis
    if inner.any():
        xi, yi = ax[inner], y[inner]
        with np.errstate(over="ignore"):
            z = _solve_z(ctx, yi / xi)
        n, dn = eval_N_and_slope(a, z)
        w = -c * dn
        r = (xi / w) ** (1 / (a - 1))
        M[inner] = -r * yi + r * xi * z + c * r**a * n
        p_star[inner] = sgn[inner] * z * r
        q_star[inner] = -r
    return p_star, q_star, M


def dual_M(ctx, x, y, tol=1e-10, method="structured"):
    """The dual function M(x, y) for the Davis context ``ctx`` (alpha >= 2)."""
    if ctx.relaxed or ctx.alpha < 2:
        raise ValueError("dual_M requires alpha >= 2")
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    if method == "saddle":
        pot = davis_potential(ctx)
        xs, ys = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        out = np.array([saddle_solve(pot, xi, yi, tol, with_gap=False).value for xi, yi in zip(xs.ravel(), ys.ravel())])
        out = out.reshape(xs.shape)
        return float(out) if scalar else out
    if method != "structured":
        raise ValueError(f"unknown method {method!r}")
    xs, ys = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    pairs = np.stack([xs.ravel(), ys.ravel()], axis=1)
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    vals = dual_saddle(ctx, uniq[:, 0], uniq[:, 1])[2][inv.ravel()].reshape(xs.shape)
    return float(vals) if scalar else vals


def dual_obstacle(ctx, x, y):
    k = (ctx.alpha - 1) / ctx.alpha**ctx.beta
    return k * (np.abs(x) ** ctx.beta - np.asarray(y, float) ** ctx.beta / ctx.s**ctx.beta)


def dual_obstacle_gap(ctx, x, y, tol=1e-10):
    g = dual_M(ctx, x, y, tol) - dual_obstacle(ctx, np.asarray(x, float), np.asarray(y, float))
    return float(g) if np.ndim(g) == 0 else g


def dual_inequality_gap(ctx, x, y, a, b, tol=1e-10):
    """2M(x,y) - M(x+a, sqrt(a^2+(y+b)^2)) - M(x-a, sqrt(a^2+(y-b)^2))."""
    x, y, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, a, b)))
    xs = np.concatenate([x.ravel(), (x + a).ravel(), (x - a).ravel()])
    ys = np.concatenate([y.ravel(), np.hypot(a, y + b).ravel(), np.hypot(a, y - b).ravel()])
    m = dual_M(ctx, xs, ys, tol).reshape(3, -1)
    g = (2 * m[0] - m[1] - m[2]).reshape(x.shape)
    return float(g) if g.ndim == 0 else g


def vector_main_gap(ctx, x, a, yvec, bvec, tol=1e-10):
    """M(x, |y|) - (M(x+a, sqrt(a^2+|y+b|^2)) + M(x-a, sqrt(a^2+|y-b|^2))) / 2.

    ``yvec``/``bvec`` may carry a leading batch axis; the last axis is R^N.
    """
    yvec, bvec = np.asarray(yvec, float), np.asarray(bvec, float)
    x, a = np.asarray(x, float), np.asarray(a, float)
    ny = np.linalg.norm(yvec, axis=-1)
    yp = np.sqrt(a * a + np.sum((yvec + bvec) ** 2, axis=-1))
    ym = np.sqrt(a * a + np.sum((yvec - bvec) ** 2, axis=-1))
    xs = np.concatenate([np.ravel(x + 0 * ny), np.ravel(x + a + 0 * ny), np.ravel(x - a + 0 * ny)])
    ys = np.concatenate([np.ravel(ny + 0 * x), np.ravel(yp + 0 * x), np.ravel(ym + 0 * x)])
    m = dual_M(ctx, xs, ys, tol).reshape(3, -1)
    g = m[0] - 0.5 * (m[1] + m[2])
    return float(g[0]) if g.size == 1 and np.ndim(ny) == 0 else g


# ---------------------------------------------------------------------------
# closed-form pairs
# ---------------------------------------------------------------------------


def poincare32_M(x, y):
    """Re (x + i y)^(3/2), principal branch, y >= 0."""
    r = np.hypot(x, y)
    return (2 * x - r) * np.sqrt(np.maximum(r + x, 0.0)) / math.sqrt(2.0)


def poincare32_U(p, q):
    return -(4.0 / 27.0) * (p**3 - 3.0 * p * q * q)


POINCARE32 = Potential(fn=poincare32_U, p_domain=(0.0, math.inf), name="poincare32")


def poincare32_check(x, y, tol=1e-10):
    """Return (closed form, minimax, difference) for the 3/2 pair."""
    closed = float(poincare32_M(x, y))
    mm = saddle_solve(POINCARE32, x, y, tol, with_gap=False).value
    return closed, mm, closed - mm


def poincare32_U_identity_gap(p, q, a):
    r = np.hypot(a, q)
    return 2 * poincare32_U(p, q) - poincare32_U(p + a, r) - poincare32_U(p - a, r)


def exp_U(p, q):
    return np.exp(p - 0.5 * np.asarray(q, float) ** 2)


def logsob_exp_gap(a):
    """2 e^{a^2/2} - e^a - e^{-a}: the main inequality for U = e^{p - q^2/2}."""
    return 2 * np.exp(0.5 * np.asarray(a, float) ** 2) - np.exp(a) - np.exp(-np.asarray(a, float))


def logsob_coefficients_ok(kmax=20):
    """Termwise comparison behind the exponential inequality: (2k)! >= 2^k k!."""
    return all(math.factorial(2 * k) >= 2**k * math.factorial(k) for k in range(kmax + 1))


def logsob_M(x, y):
    return x * np.log(x) - y * y / (2 * x)


def trivial_M(x, y, C=1.0, D=0.0, Q=0.0):
    return C * (x * x - y * y) + D * x + Q


# ---------------------------------------------------------------------------
# Monge-Ampere matrix
# ---------------------------------------------------------------------------


def _ma_central(f, x, y, h):
    f0 = f(x, y)
    m_xx = (f(x + h, y) - 2 * f0 + f(x - h, y)) / h**2
    m_yy = (f(x, y + h) - 2 * f0 + f(x, y - h)) / h**2
    m_y = (f(x, y + h) - f(x, y - h)) / (2 * h)
    m_xy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)
    return np.array([[m_xx + m_y / y, m_xy], [m_xy, m_yy]], dtype=float)


def monge_ampere_matrix(M_fn, x, y, h=None, richardson=True):
    """[[M_xx + M_y / y, M_xy], [M_xy, M_yy]] by central differences.

    With ``richardson`` the step-h and step-h/2 stencils are combined to cancel
    the O(h^2) term, which matters where M has large fourth derivatives.
    """
    if h is None:
        h = 1e-3 * (1 + abs(x) + abs(y))
    if not y > h:
        raise ValueError("need y > h for the central differences")
    coarse = _ma_central(M_fn, x, y, h)
    if not richardson:
        return coarse
    fine = _ma_central(M_fn, x, y, h / 2)
    return (4 * fine - coarse) / 3


def monge_ampere_eigs(M_fn, x, y, h=None, richardson=True):
    lam = np.linalg.eigvalsh(monge_ampere_matrix(M_fn, x, y, h, richardson))
    return float(lam[0]), float(lam[1])


# ---------------------------------------------------------------------------
# abstract duality
# ---------------------------------------------------------------------------


def abstract_dualize(U_pot, O_fn, x, y, tol=1e-9):
    """Return (M(x, y), O~(x, y)) where both are min/inf over q <= 0 of
    sup over p in the potential's p-domain, applied to U(p, |q|) and
    O(p, |q|) respectively."""
    pot = Potential(
        fn=lambda p, q: U_pot(p, abs(q)),
        p_domain=U_pot.p_domain,
        q_domain=(-math.inf, 0.0),
        witness=U_pot.witness,
        name=U_pot.name,
    )
    m_val = saddle_solve(pot, x, y, tol, with_gap=False).value
    counter = [0]
    xatol = max(math.sqrt(tol) * 1e-2, 1e-12)

    def outer(q):
        return _maximize_1d(lambda p: p * x + q * y + O_fn(p, abs(q)), *pot.p_domain, xatol / 10, counter)[1]

    o_val = _minimize_1d(outer, -math.inf, 0.0, xatol, counter)[1]
    return m_val, o_val
