"""Smallest zeros s_alpha across alpha, with the sqrt(2/alpha) lower bound and
the Hermite-polynomial check at even integers."""

import math
from dataclasses import dataclass

from _config import parse_config, save_rows

from cubeduality.specfun import hermite_smallest_root, smallest_zero


@dataclass
class ZeroTableConfig:
    """Tabulate s_alpha on an alpha grid."""

    alpha_min: float = 0.25
    alpha_max: float = 30.0
    alpha_step: float = 0.25
    out_dir: str = "results"


def main(cfg):
    count = int(round((cfg.alpha_max - cfg.alpha_min) / cfg.alpha_step)) + 1
    rows = []
    for k in range(count):
        a = cfg.alpha_min + k * cfg.alpha_step
        s = smallest_zero(a)
        even = a >= 2 and float(a).is_integer() and int(a) % 2 == 0
        herm = hermite_smallest_root(int(a)) if even else math.nan
        rows.append(
            {
                "alpha": a,
                "s_alpha": s,
                "sqrt_2_over_alpha": math.sqrt(2 / a),
                "ratio_to_lower": s / math.sqrt(2 / a),
                "hermite_root": herm,
            }
        )
    path = save_rows(rows, cfg.out_dir, "zero_table", cfg)
    worst = min(r["ratio_to_lower"] for r in rows if r["alpha"] >= 2)
    print(f"{len(rows)} rows -> {path}; min s/sqrt(2/alpha) over alpha >= 2: {worst:.6f}")


if __name__ == "__main__":
    main(parse_config(ZeroTableConfig))
