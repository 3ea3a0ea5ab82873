"""Acceptance suite: twelve end-to-end criteria at their stated tolerances.

Each criterion returns (ok, detail) and is timed against its budget.  Under
pytest the PASS/FAIL lines are collected into the terminal summary; run the
file directly to print them:

    python tests/test_acceptance.py
"""

import math
import time

import numpy as np
import pytest

from cubeduality import bellman, cube, duality, dyadic
from cubeduality.specfun import gamma_fn, smallest_zero, solve_p0

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from another directory
    ACCEPTANCE_LINES = []


def c01_zeros():
    s2 = smallest_zero(2)
    s4 = smallest_zero(4)
    oracle = math.sqrt(3 - math.sqrt(6))
    ok = abs(s2 - 1) <= 1e-10 and abs(s4 - oracle) <= 1e-8
    return ok, f"|s2-1|={abs(s2 - 1):.2e} |s4-oracle|={abs(s4 - oracle):.2e}"


def c02_bounds_monotone():
    alphas = [2 + 0.5 * k for k in range(37)]
    zs = [smallest_zero(a) for a in alphas]
    bounds = all(math.sqrt(2 / a) <= s <= 1 for a, s in zip(alphas, zs))
    mono = all(b < a for a, b in zip(zs, zs[1:]))
    return bounds and mono, f"bounds={bounds} strict_decrease={mono} s20={zs[-1]:.6f}"


def c03_bellman():
    worst = {}
    ok = True
    for a in (2, 3, 4, 6, 10):
        ctx = bellman.make_context(a)
        grid = bellman.acceptance_grid(50)
        pts = grid.mesh()
        gaps = bellman.bellman_gaps(ctx, pts["p"], pts["q"], pts["a"])
        worst[a] = float(gaps.min())
        ok &= bool(np.all(gaps >= -1e-9))
        if a == 2:
            ok &= bool(np.max(np.abs(gaps)) <= 1e-12)
    return ok, "worst " + " ".join(f"a{a}={g:.2e}" for a, g in worst.items())


def c04_dual():
    g = bellman.GridSpec({"x": (-2.0, 2.0, 20), "y": (0.0, 2.0, 20), "a": (-1.0, 1.0, 20), "b": (-1.0, 1.0, 20)})
    pts = g.mesh()
    x, y, a, b = pts["x"], pts["y"], pts["a"], pts["b"]
    rng = np.random.default_rng(0)
    xv, av = rng.uniform(-2, 2, 1000), rng.uniform(-1, 1, 1000)
    yv, bv = rng.uniform(-1, 1, (1000, 3)), rng.uniform(-1, 1, (1000, 3))
    ok = True
    parts = []
    for alpha in (2, 3, 4):
        ctx = bellman.make_context(alpha)
        obs = duality.dual_obstacle_gap(ctx, x, y)
        ineq = duality.dual_inequality_gap(ctx, x, y, a, b)
        vec = duality.vector_main_gap(ctx, xv, av, yv, bv)
        ok &= bool(obs.min() >= -1e-6 and ineq.min() >= -1e-6 and vec.min() >= -1e-6)
        parts.append(f"a{alpha}:obs={obs.min():.1e},ineq={ineq.min():.1e},vec={vec.min():.1e}")
        if alpha == 2:
            err = float(np.max(np.abs(duality.dual_M(ctx, x, y) - (x * x - y * y) / 4)))
            ok &= err <= 1e-8
            parts.append(f"closed_form_err={err:.1e}")
    return ok, " ".join(parts)


def c05_poincare32():
    xs, ys = np.linspace(-2, 2, 40), np.linspace(0, 2, 40)
    worst = max(abs(duality.poincare32_check(x, y)[2]) for x in xs for y in ys)
    rng = np.random.default_rng(0)
    p, q, a = rng.uniform(-2, 2, size=(3, 1000))
    ident = float(np.max(np.abs(duality.poincare32_U_identity_gap(p, q, a))))
    return worst <= 1e-7 and ident <= 1e-12, f"minimax_err={worst:.2e} identity={ident:.2e}"


def c06_lp_poincare():
    ok = True
    worst = math.inf
    for n in (1, 2, 3, 4):
        for p in (1.1, 1.5, 1.9, 2.0):
            rep = cube.lp_poincare_sweep(n, p, samples=10_000, seed=0, tol=1e-9)
            ok &= rep.ok
            worst = min(worst, rep.worst_gap)
    dict_gap = cube.lp_poincare_gap(cube.dictator(1), 2.0, cube.s_conj(2.0))
    ok &= abs(dict_gap) <= 1e-12
    return ok, f"worst={worst:.2e} dictator_p2={dict_gap:.1e}"


def c07_rademacher():
    ok = True
    worst = math.inf
    for n in (1, 2, 3):
        for p in (1.1, 1.5, 1.9, 2.0):
            rep = cube.rademacher_sweep(n, p, samples=10_000, seed=0, tol=1e-9)
            ok &= rep.ok
            worst = min(worst, rep.worst_gap)
    return ok, f"worst={worst:.2e}"


def c08_comparison():
    ps = [round(1 + k / 100, 2) for k in range(1, 100)]
    margins = []
    for p in ps:
        s = cube.s_conj(p)
        margins.append(cube.rademacher_constant(p, s) - (p - 1) ** p)
    p0 = solve_p0()
    ok = min(margins) > 0 and abs(p0 - 1.847) <= 1e-3
    ok &= abs(gamma_fn((p0 + 1) / 2) - math.sqrt(math.pi) / 2) <= 1e-10
    return ok, f"min(LHS-NS)={min(margins):.3e} p0={p0:.6f}"


def c09_sigma():
    ok = True
    for n in (2, 3, 4):
        ok &= cube.sigma_exhaustive(n, 2.0)[0] == 1.0
    low = []
    for p in (1.0, 1.25, 1.5, 1.75, 2.0):
        sig = cube.sigma_exhaustive(4, p)[0]
        lb = cube.sigma_lower_bound(p)
        ok &= sig >= lb - 1e-9
        low.append(f"{p:g}:{sig:.4f}>={lb:.4f}")
    for p in (2.0, 3.0, 4.0):
        ok &= cube.sigma_exhaustive(4, p)[0] == 1.0
    return ok, " ".join(low)


def c10_dyadic():
    leaves = dyadic.random_martingales(8, 10_000, 0, mean_zero=False)
    ortho = float(np.max(np.abs(dyadic.orthogonality_defect(leaves))))
    cww = dyadic.cww_sweep(8, 10_000, 0, tol=1e-12)
    ok = ortho <= 1e-12 and cww.ok
    ratios = []
    for p in (1.0, 1.5, 2.0, 3.0, 4.0):
        rep, r = dyadic.davis_sweep(p, cube.s_alpha(p), 8, 10_000, 0)
        ok &= rep.ok
        ratios.append(f"{p:g}:{r:.3f}")
    wolff = dyadic.wolff_sweep((0.5, 1.0, 2.0), 8, 10_000, 0)
    ok &= wolff.ok
    return ok, f"ortho={ortho:.1e} cww={cww.worst_gap:.1e} wolff={wolff.worst_gap:.3f} max|g|/|S| " + " ".join(ratios)


def c11_degeneracy():
    est, _ = cube.best_constant_search(1, 3.0)
    ratios = [cube.affine_family_ratio(3.0, 10.0**-k) for k in range(1, 6)]
    quotients = [b / a for a, b in zip(ratios, ratios[1:])]
    geometric = all(0.05 <= q <= 0.2 for q in quotients)
    return est < 0.01 and geometric, f"estimate={est:.2e} quotients=" + ",".join(f"{q:.3f}" for q in quotients)


def c12_monge_ampere():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0.2, 2.0, size=(100, 2))
    ok = True
    parts = []
    for name, fn in (("xlogx", duality.logsob_M), ("re_z32", duality.poincare32_M)):
        mats = [duality.monge_ampere_matrix(fn, x, y) for x, y in pts]
        lam = max(float(np.linalg.eigvalsh(m)[-1]) for m in mats)
        det = max(abs(np.linalg.det(m)) / (1 + np.sum(m * m)) for m in mats)
        ok &= lam <= 1e-6 and det <= 1e-6
        parts.append(f"{name}:lam_max={lam:.1e},det/scale={det:.1e}")
    return ok, " ".join(parts)


CRITERIA = [
    (1, "smallest zeros s2 and s4", c01_zeros, 1.0),
    (2, "zero bounds and monotonicity", c02_bounds_monotone, 2.0),
    (3, "Bellman grid sweep", c03_bellman, 60.0),
    (4, "dual grid sweep", c04_dual, 300.0),
    (5, "3/2-power pair", c05_poincare32, 30.0),
    (6, "cube Poincare-type sweep", c06_lp_poincare, 60.0),
    (7, "Rademacher-type sweep", c07_rademacher, 120.0),
    (8, "comparison with (p-1)^p and p0", c08_comparison, 5.0),
    (9, "surface measure table", c09_sigma, 30.0),
    (10, "dyadic square-function sweeps", c10_dyadic, 60.0),
    (11, "p > 2 degeneracy", c11_degeneracy, None),
    (12, "Monge-Ampere degeneracy", c12_monge_ampere, 5.0),
]


def evaluate(number, label, fn, budget):
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    in_time = budget is None or elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    limit = f"<{budget:g}s" if budget is not None else "no limit"
    line = f"{status} criterion {number:2d} ({label}): {detail} [{elapsed:.2f}s, {limit}]"
    return ok, in_time, line


@pytest.mark.parametrize("number,label,fn,budget", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, label, fn, budget):
    ok, in_time, line = evaluate(number, label, fn, budget)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert in_time, line


if __name__ == "__main__":
    failures = 0
    for crit in CRITERIA:
        ok, in_time, line = evaluate(*crit)
        print(line, flush=True)
        failures += not (ok and in_time)
    raise SystemExit(1 if failures else 0)
