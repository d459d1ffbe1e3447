"""Cells, tightness LPs and wall time of the cell enumeration as n grows.

Prints one row per n: mean cells found, the zone bound on cells, n!, and the
LP count against its (n-1)|C| ceiling.

    python3 scripts/enumeration_scaling.py --p 2 --n-max 9 --reps 5
"""
import argparse
import math
import random
import time
from dataclasses import dataclass

from rankopt import build_hyperplanes, enumerate_cells, zeta

from _instances import random_dataset


@dataclass
class Config:
    p: int = 2
    n_min: int = 3
    n_max: int = 8
    reps: int = 5
    seed: int = 0


def run(cfg: Config) -> None:
    rng = random.Random(cfg.seed)
    print(f"{'n':>3} {'cells':>9} {'zeta':>7} {'n!':>8} {'LPs':>9} {'(n-1)|C|':>9} {'sec':>7}")
    for n in range(cfg.n_min, cfg.n_max + 1):
        cells = lps = bound = 0
        t = time.perf_counter()
        for _ in range(cfg.reps):
            arr = build_hyperplanes(random_dataset(rng, n, cfg.p))
            count = [0]
            stats = enumerate_cells(arr, lambda pi, w: count.__setitem__(0, count[0] + 1))
            cells += count[0]
            lps += stats.lps
            bound += zeta(len(arr.classes()), cfg.p)
        sec = (time.perf_counter() - t) / cfg.reps
        r = cfg.reps
        print(f"{n:>3} {cells / r:>9.1f} {bound / r:>7.1f} {math.factorial(n):>8} "
              f"{lps / r:>9.1f} {(n - 1) * cells / r:>9.1f} {sec:>7.2f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Config()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=int, default=val)
    run(Config(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
