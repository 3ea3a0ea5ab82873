"""Batch front-end.

    cubeduality constants      [--alpha-min A --alpha-max B --alpha-step S]
    cubeduality poincare-table [--p-grid p1,p2,...]
    cubeduality verify TARGET  [--n N] [--depth D] [--samples K] [--seed U64] [--tol T]
    cubeduality sigma          [--n N] [--p-grid ...]

Common options: --workers W (env TOOL_WORKERS), --format csv|json, --out PATH.
Exit codes: 0 clean, 1 usage error, 2 inequality violation, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bellman, cube, duality, dyadic
from .errors import DimensionError, NumericalFailure

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_NUMERIC = 0, 1, 2, 3
TARGETS = ("bellman", "dual", "cube", "rademacher", "dyadic", "ma", "p32")


@dataclass
class RunConfig:
    command: str
    target: str = ""
    alpha_grid: tuple = ()
    p_grid: tuple = ()
    n: int | None = None
    depth: int = 8
    samples: int = 10_000
    seed: int = 0
    tol: float | None = None
    grid: int | None = None
    workers: int = 1
    fmt: str = "csv"
    out: str | None = None
    timings: bool = False


@dataclass
class ReportRecord:
    check_id: str
    params: dict
    worst_gap: float
    n_checked: int
    n_violations: int
    tol: float
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_report(cls, check_id, params, report, wall_time, **extra):
        return cls(check_id, params, report.worst_gap, report.n_checked, report.n_violations, report.tol, wall_time, extra)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_token(v):
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_token(x)}" for k, x in v.items()) + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g") if math.isfinite(v) else "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return json.dumps(v)


def render(rows, columns, fmt):
    """Serialise a list of dict rows; column order is fixed by ``columns``."""
    buf = io.StringIO()
    if fmt == "json":
        for row in rows:
            buf.write(_json_token({c: row[c] for c in columns}) + "\n")
    else:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            cells = []
            for c in columns:
                v = row[c]
                if isinstance(v, dict):
                    v = ";".join(f"{k}={_fmt(x)}" for k, x in v.items())
                cells.append(_fmt(v))
            writer.writerow(cells)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def constants_rows(alpha_grid):
    rows = []
    for a in alpha_grid:
        if not 0 < a <= 64:
            raise ValueError(f"alpha {a} outside (0, 64]")
        s = cube.s_alpha(a)
        lower = math.sqrt(2 / a)
        # the bracket sqrt(2/alpha) <= s <= 1 is a statement about alpha >= 2;
        # below 2 monotonicity gives s >= 1 instead
        ok = (lower <= s <= 1.0) if a >= 2 else s >= 1.0
        rows.append({"alpha": float(a), "s_alpha": s, "lower": lower, "upper": 1.0, "bounds_ok": ok})
    return rows


CONSTANTS_COLUMNS = ["alpha", "s_alpha", "lower", "upper", "bounds_ok"]


def poincare_rows(p_grid):
    rows = []
    for p in p_grid:
        if not 1 < p <= 2:
            raise ValueError(f"p {p} outside (1, 2]")
        pc = cube.conjugate(p)
        s = cube.s_alpha(pc)
        ns = (p - 1) ** p
        lhs = cube.rademacher_constant(p, s)
        strict = lhs > ns if p < 2 else True
        rows.append(
            {
                "p": float(p),
                "p_conj": pc,
                "s_conj": s,
                "s_conj_pow_p": s**p,
                "p_minus_1_pow_p": ns,
                "rademacher_constant": lhs,
                "two_over_pi": 2 / math.pi,
                "t_lower": max(2 / math.pi, s),
                "strict_ok": strict,
                "degenerate": s < 2 / math.pi,
            }
        )
    return rows


POINCARE_COLUMNS = [
    "p",
    "p_conj",
    "s_conj",
    "s_conj_pow_p",
    "p_minus_1_pow_p",
    "rademacher_constant",
    "two_over_pi",
    "t_lower",
    "strict_ok",
    "degenerate",
]


def sigma_rows(n, p_grid, tol=1e-9):
    rows = []
    for p in p_grid:
        sig, arg = cube.sigma_exhaustive(n, p)
        if 1 <= p <= 2:
            lb = cube.sigma_lower_bound(p)
        elif p > 2:
            lb = 1.0
        else:
            lb = 0.0
        rows.append(
            {"n": n, "p": float(p), "sigma": sig, "lower_bound": lb, "argmin_hex": hex(arg.mask), "ok": sig >= lb - tol}
        )
    return rows


SIGMA_COLUMNS = ["n", "p", "sigma", "lower_bound", "argmin_hex", "ok"]
RECORD_COLUMNS = ["check_id", "params", "worst_gap", "n_checked", "n_violations", "tol"]


# ---------------------------------------------------------------------------
# verification jobs (top-level so they pickle for the process pool)
# ---------------------------------------------------------------------------


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def job_bellman(alpha, count, tol):
    ctx = bellman.make_context(alpha)
    rep, dt = _timed(bellman.verify_bellman_grid, ctx, bellman.acceptance_grid(count), tol)
    records = [ReportRecord.from_report("bellman", {"alpha": alpha, "grid": count}, rep, dt)]
    if alpha == 2:
        pts = bellman.acceptance_grid(count).mesh()
        gaps = bellman.bellman_gaps(ctx, pts["p"], pts["q"], pts["a"])
        rep2 = bellman.summarize(-np.abs(gaps), [pts["p"], pts["q"], pts["a"]], 1e-12, bellman.BELLMAN_CHECKS)
        records.append(ReportRecord.from_report("bellman_alpha2_identity", {"alpha": alpha}, rep2, 0.0))
    return records


def dual_grid(count):
    g = bellman.GridSpec({"x": (-2.0, 2.0, count), "y": (0.0, 2.0, count), "a": (-1.0, 1.0, count), "b": (-1.0, 1.0, count)})
    return g.mesh()


def job_dual(alpha, count, samples, seed, tol):
    ctx = bellman.make_context(alpha)
    t0 = time.perf_counter()
    pts = dual_grid(count)
    x, y, a, b = pts["x"], pts["y"], pts["a"], pts["b"]
    obs = duality.dual_obstacle_gap(ctx, x, y)
    ineq = duality.dual_inequality_gap(ctx, x, y, a, b)
    rep = bellman.summarize(np.column_stack([obs, ineq]), [x, y, a, b], tol, ("dual_obstacle", "dual_inequality"))
    records = [ReportRecord.from_report("dual", {"alpha": alpha, "grid": count}, rep, time.perf_counter() - t0)]
    if alpha == 2:
        diff = duality.dual_M(ctx, x, y) - (x * x - y * y) / 4
        rep2 = bellman.summarize(-np.abs(diff), [x, y], 1e-8, ("closed_form",))
        records.append(ReportRecord.from_report("dual_alpha2_closed_form", {"alpha": alpha}, rep2, 0.0))
    t0 = time.perf_counter()
    xv, av, yv, bv = vector_main_samples(samples, seed)
    gaps = duality.vector_main_gap(ctx, xv, av, yv, bv)
    rep3 = bellman.summarize(gaps, [np.arange(samples)], tol, ("vector_main",))
    records.append(ReportRecord.from_report("dual_vector_main", {"alpha": alpha, "N": 3, "seed": seed}, rep3, time.perf_counter() - t0))
    return records


def vector_main_samples(samples, seed, dim=3):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-2, 2, samples)
    a = rng.uniform(-1, 1, samples)
    y = rng.uniform(-1, 1, (samples, dim))
    b = rng.uniform(-1, 1, (samples, dim))
    return x, a, y, b


def job_cube(n, p, samples, seed, tol):
    rep, dt = _timed(cube.lp_poincare_sweep, n, p, samples, seed, tol)
    return [ReportRecord.from_report("lp_poincare", {"n": n, "p": p, "seed": seed}, rep, dt)]


def job_rademacher(n, p, samples, seed, tol):
    rep, dt = _timed(cube.rademacher_sweep, n, p, samples, seed, tol)
    return [ReportRecord.from_report("rademacher", {"n": n, "p": p, "seed": seed}, rep, dt)]


def job_dyadic(depth, samples, seed, p_grid):
    records = []
    t0 = time.perf_counter()
    for sub, mean_zero in (("mean_zero", True), ("shifted", False)):
        leaves = dyadic.random_martingales(depth, samples, seed, mean_zero)
        d = dyadic.orthogonality_defect(leaves)
        rep = bellman.summarize(-np.abs(d), [np.arange(samples)], 1e-12, ("orthogonality",))
        records.append(ReportRecord.from_report("dyadic_orthogonality", {"depth": depth, "sample": sub}, rep, 0.0))
    rep = dyadic.cww_sweep(depth, samples, seed)
    records.append(ReportRecord.from_report("dyadic_cww", {"depth": depth}, rep, 0.0))
    for alpha in (2, 3, 4, 6):
        ctx = bellman.make_context(alpha)
        rep = dyadic.master_bound_sweep(lambda p, q, ctx=ctx: bellman.U(ctx, p, q), depth, samples, seed)
        records.append(ReportRecord.from_report("dyadic_master_bound", {"depth": depth, "alpha": alpha}, rep, 0.0))
    for p in p_grid:
        rep, ratio = dyadic.davis_sweep(p, cube.s_alpha(p), depth, samples, seed)
        records.append(
            ReportRecord.from_report("dyadic_davis", {"depth": depth, "p": p}, rep, 0.0, max_ratio=ratio)
        )
    rep = dyadic.wolff_sweep((0.5, 1.0, 2.0), depth, samples, seed)
    records.append(ReportRecord.from_report("dyadic_wolff", {"depth": depth}, rep, time.perf_counter() - t0))
    return records


MA_FUNCTIONS = {"logsob": duality.logsob_M, "poincare32": duality.poincare32_M}


def job_ma(samples, seed, tol):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.2, 2.0, size=(samples, 2))
    records = []
    for name, fn in MA_FUNCTIONS.items():
        t0 = time.perf_counter()
        mats = [duality.monge_ampere_matrix(fn, x, y) for x, y in pts]
        lam_max = np.array([np.linalg.eigvalsh(m)[-1] for m in mats])
        det_rel = np.array([abs(np.linalg.det(m)) / (1 + np.sum(m * m)) for m in mats])
        rep = bellman.summarize(np.column_stack([-lam_max, -det_rel]), [pts[:, 0], pts[:, 1]], tol, ("eig_max", "det"))
        records.append(ReportRecord.from_report("monge_ampere", {"M": name}, rep, time.perf_counter() - t0))
    return records


def job_p32(count, samples, seed, tol):
    t0 = time.perf_counter()
    xs = np.linspace(-2, 2, count)
    ys = np.linspace(0, 2, count)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    diffs = np.array([duality.poincare32_check(x, y)[2] for x, y in zip(X.ravel(), Y.ravel())])
    rep = bellman.summarize(-np.abs(diffs), [X.ravel(), Y.ravel()], tol, ("minimax",))
    records = [ReportRecord.from_report("p32_minimax", {"grid": count}, rep, time.perf_counter() - t0)]
    rng = np.random.default_rng(seed)
    p, q, a = rng.uniform(-2, 2, size=(3, samples))
    ident = duality.poincare32_U_identity_gap(p, q, a)
    rep2 = bellman.summarize(-np.abs(ident), [p, q, a], 1e-12, ("cubic_identity",))
    records.append(ReportRecord.from_report("p32_identity", {"seed": seed}, rep2, 0.0))
    return records


def verify_jobs(cfg):
    """(callable, args) pairs for one target, in output order."""
    t = cfg.target
    if t == "bellman":
        alphas = cfg.alpha_grid or (2, 3, 4, 6, 10)
        return [(job_bellman, (a, cfg.grid or 50, cfg.tol or 1e-9)) for a in alphas]
    if t == "dual":
        alphas = cfg.alpha_grid or (2, 3, 4)
        return [(job_dual, (a, cfg.grid or 20, min(cfg.samples, 1000), cfg.seed, cfg.tol or 1e-6)) for a in alphas]
    if t in ("cube", "rademacher"):
        ns = (cfg.n,) if cfg.n else ((1, 2, 3, 4) if t == "cube" else (1, 2, 3))
        ps = cfg.p_grid or (1.1, 1.5, 1.9, 2.0)
        fn = job_cube if t == "cube" else job_rademacher
        return [(fn, (n, p, cfg.samples, cfg.seed, cfg.tol or 1e-9)) for n in ns for p in ps]
    if t == "dyadic":
        return [(job_dyadic, (cfg.depth, cfg.samples, cfg.seed, cfg.p_grid or (1.0, 1.5, 2.0, 3.0, 4.0)))]
    if t == "ma":
        return [(job_ma, (min(cfg.samples, 100), cfg.seed, cfg.tol or 1e-6))]
    if t == "p32":
        return [(job_p32, (cfg.grid or 40, min(cfg.samples, 1000), cfg.seed, cfg.tol or 1e-7))]
    raise ValueError(f"unknown target {t!r}")


def run_verify(cfg):
    jobs = verify_jobs(cfg)
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(fn, *args) for fn, args in jobs]
            chunks = [f.result() for f in futures]
    else:
        chunks = [fn(*args) for fn, args in jobs]
    return [rec for chunk in chunks for rec in chunk]


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser():
    parser = _Parser(prog="cubeduality", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=["constants", "poincare-table", "verify", "sigma"])
    parser.add_argument("target", nargs="?", choices=TARGETS)
    parser.add_argument("--alpha-min", type=float)
    parser.add_argument("--alpha-max", type=float)
    parser.add_argument("--alpha-step", type=float)
    parser.add_argument("--alpha", type=_float_list, help="explicit alpha list, e.g. 2,3,4")
    parser.add_argument("--p-grid", "--p", dest="p_grid", type=_float_list)
    parser.add_argument("--n", type=int)
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--seed", type=_seed, default=0)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--grid", type=int, help="points per axis for grid sweeps")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
    parser.add_argument("--out")
    parser.add_argument("--timings", action="store_true", help="append wall_time (breaks byte-identical reruns)")
    return parser


def _alpha_grid(ns, default):
    if ns.alpha:
        return ns.alpha
    if ns.alpha_min is None and ns.alpha_max is None and ns.alpha_step is None:
        return default
    lo = ns.alpha_min if ns.alpha_min is not None else 2.0
    hi = ns.alpha_max if ns.alpha_max is not None else lo
    step = ns.alpha_step if ns.alpha_step is not None else 0.5
    if step <= 0 or hi < lo:
        raise ValueError("empty alpha range")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + k * step, 12) for k in range(count))


def config_from_args(ns):
    workers = ns.workers
    if workers is None:
        workers = int(os.environ.get("TOOL_WORKERS", "1") or 1)
    if ns.command == "verify" and not ns.target:
        raise ValueError("verify needs a target: " + ", ".join(TARGETS))
    default_alpha = ()
    if ns.command == "constants":
        default_alpha = tuple(2 + 0.5 * k for k in range(37))
    for name in ("samples", "depth"):
        if getattr(ns, name) < 1:
            raise ValueError(f"--{name} must be positive")
    return RunConfig(
        command=ns.command,
        target=ns.target or "",
        alpha_grid=_alpha_grid(ns, default_alpha),
        p_grid=ns.p_grid or (),
        n=ns.n,
        depth=ns.depth,
        samples=ns.samples,
        seed=ns.seed,
        tol=ns.tol,
        grid=ns.grid,
        workers=max(1, workers),
        fmt=ns.fmt,
        out=ns.out,
        timings=ns.timings,
    )


def execute(cfg):
    """Run a command; returns (text, exit_code)."""
    if cfg.command == "constants":
        rows = constants_rows(cfg.alpha_grid)
        return render(rows, CONSTANTS_COLUMNS, cfg.fmt), EXIT_OK if all(r["bounds_ok"] for r in rows) else EXIT_VIOLATION
    if cfg.command == "poincare-table":
        grid = cfg.p_grid or tuple(round(1 + k / 100, 2) for k in range(1, 101))
        rows = poincare_rows(grid)
        return render(rows, POINCARE_COLUMNS, cfg.fmt), EXIT_OK if all(r["strict_ok"] for r in rows) else EXIT_VIOLATION
    if cfg.command == "sigma":
        n = cfg.n or 4
        rows = sigma_rows(n, cfg.p_grid or (1.0, 1.25, 1.5, 1.75, 2.0, 3.0, 4.0), cfg.tol or 1e-9)
        return render(rows, SIGMA_COLUMNS, cfg.fmt), EXIT_OK if all(r["ok"] for r in rows) else EXIT_VIOLATION
    records = run_verify(cfg)
    rows = []
    for r in records:
        row = {
            "check_id": r.check_id,
            "params": {**r.params, **r.extra},
            "worst_gap": r.worst_gap,
            "n_checked": r.n_checked,
            "n_violations": r.n_violations,
            "tol": r.tol,
            "wall_time": r.wall_time,
        }
        rows.append(row)
    cols = RECORD_COLUMNS + (["wall_time"] if cfg.timings else [])
    code = EXIT_OK if all(r.n_violations == 0 for r in records) else EXIT_VIOLATION
    return render(rows, cols, cfg.fmt), code


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        try:
            cfg = config_from_args(ns)
        except ValueError as exc:
            parser.error(str(exc))
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code
    try:
        text, code = execute(cfg)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code

