"""CCC (ellipsoid + rounding) against cell enumeration and brute force.

Each row is one random instance with centered nondecreasing scores. Values must
agree exactly; the script exits nonzero on any mismatch.

    python3 scripts/solver_comparison.py --count 10 --n-max 5 --p-max 2 --fast
"""
import argparse
import random
import sys
import time
from dataclasses import dataclass

from rankopt import brute_min, minimize_ccc, minimize_gen, score_oracle, verify_optimality

from _instances import centered_scores, random_dataset


@dataclass
class Config:
    count: int = 10
    n_min: int = 3
    n_max: int = 5
    p_max: int = 2
    num_bits: int = 5
    seed: int = 1
    fast: bool = False


def run(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    bad = 0
    print(f"{'#':>3} {'n':>2} {'p':>2} {'t0':>14} {'gen s':>7} {'ccc s':>7} {'calls':>6} {'cuts':>7}  ok")
    for k in range(cfg.count):
        n, p = rng.randint(cfg.n_min, cfg.n_max), rng.randint(1, cfg.p_max)
        ds = random_dataset(rng, n, p, cfg.num_bits, dens=(1, 2))
        alpha = centered_scores(rng, n)
        ref = brute_min(ds, alpha)
        t = time.perf_counter()
        gen = minimize_gen(ds, score_oracle(alpha))
        t_gen = time.perf_counter() - t
        t = time.perf_counter()
        ccc = minimize_ccc(ds, alpha, fast=cfg.fast)
        t_ccc = time.perf_counter() - t
        ok = gen.value == ccc.t0 == ref.value and verify_optimality(ds, alpha, ccc.beta0)
        bad += not ok
        print(f"{k:>3} {n:>2} {p:>2} {str(ccc.t0):>14} {t_gen:>7.2f} {t_ccc:>7.2f} "
              f"{ccc.stats['oracle_calls']:>6} {ccc.stats['cuts']:>7}  {'yes' if ok else 'NO'}")
    print(f"{cfg.count - bad}/{cfg.count} exact")
    return 1 if bad else 0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Config()).items():
        if isinstance(val, bool):
            ap.add_argument("--" + name, action="store_true")
        else:
            ap.add_argument("--" + name.replace("_", "-"), type=type(val), default=val)
    sys.exit(run(Config(**vars(ap.parse_args()))))


if __name__ == "__main__":
    main()
