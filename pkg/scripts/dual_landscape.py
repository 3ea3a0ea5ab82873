"""The dual function M(x, y) on a grid for several alpha, with the structured
solver cross-checked against the generic nested saddle solver on a subgrid."""

import time
from dataclasses import dataclass

import numpy as np
from _config import parse_config, save_rows

from cubeduality.bellman import make_context
from cubeduality.duality import dual_M, dual_obstacle


@dataclass
class LandscapeConfig:
    """Evaluate M and its obstacle on [x_min, x_max] x [0, y_max]."""

    alphas: tuple = (2.0, 3.0, 4.0, 6.0)
    x_max: float = 2.0
    y_max: float = 2.0
    count: int = 41
    check_every: int = 8
    out_dir: str = "results"


def main(cfg):
    xs = np.linspace(-cfg.x_max, cfg.x_max, cfg.count)
    ys = np.linspace(0.0, cfg.y_max, cfg.count)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    rows = []
    for a in cfg.alphas:
        ctx = make_context(a)
        t0 = time.perf_counter()
        M = dual_M(ctx, X, Y)
        t_fast = time.perf_counter() - t0
        sub = (slice(None, None, cfg.check_every), slice(None, None, cfg.check_every))
        t0 = time.perf_counter()
        ref = dual_M(ctx, X[sub], Y[sub], tol=1e-12, method="saddle")
        t_slow = time.perf_counter() - t0
        diff = float(np.max(np.abs(ref - M[sub])))
        above = float(np.min(M - dual_obstacle(ctx, X, Y)))
        print(f"alpha={a:g} structured {t_fast:.3f}s, saddle subgrid {t_slow:.2f}s, max diff {diff:.2e}, min(M - obstacle) {above:.2e}")
        for x, y, m in zip(X.ravel(), Y.ravel(), M.ravel()):
            rows.append({"alpha": a, "x": float(x), "y": float(y), "M": float(m)})
    print("->", save_rows(rows, cfg.out_dir, "dual_landscape", cfg))


if __name__ == "__main__":
    main(parse_config(LandscapeConfig))
