"""Numerical upper estimates of the cube Poincare constant c_p(n) next to the
lower bounds max(s_{p'}^p, ...) and the (p-1)^p comparison value."""

from dataclasses import dataclass

from _config import parse_config, save_rows

from cubeduality.cube import best_constant_search, s_conj


@dataclass
class BestConstantConfig:
    """Search for c_p(n) by restarted coordinate descent."""

    dims: tuple = (1.0, 2.0, 3.0, 4.0)
    p_grid: tuple = (1.1, 1.25, 1.5, 1.75, 1.9, 2.0, 3.0)
    restarts: int = 6
    seed: int = 0
    out_dir: str = "results"


def main(cfg):
    rows = []
    for n in (int(d) for d in cfg.dims):
        for p in cfg.p_grid:
            est, witness = best_constant_search(n, p, restarts=cfg.restarts, seed=cfg.seed)
            lower = s_conj(p) ** p if p <= 2 else 0.0
            rows.append(
                {
                    "n": n,
                    "p": p,
                    "estimate": est,
                    "s_conj_pow_p": lower,
                    "p_minus_1_pow_p": (p - 1) ** p,
                    "witness_range": float(witness.values.max() - witness.values.min()),
                }
            )
            print(f"n={n} p={p:<5g} estimate={est:.6f} lower={lower:.6f}", flush=True)
    print("->", save_rows(rows, cfg.out_dir, "best_constants", cfg))


if __name__ == "__main__":
    main(parse_config(BestConstantConfig))
