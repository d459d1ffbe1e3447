"""Random rational instances shared by the experiment scripts."""
import random
from fractions import Fraction

from rankopt import Dataset, DuplicateRow, validate


def random_dataset(rng: random.Random, n: int, p: int, num_bits: int = 8, dens=(1, 2, 3)) -> Dataset:
    hi = 2 ** (num_bits - 1) - 1
    while True:
        X = [[Fraction(rng.randint(-hi, hi), rng.choice(dens)) for _ in range(p)] for _ in range(n)]
        y = [Fraction(rng.randint(-hi, hi), rng.choice(dens)) for _ in range(n)]
        ds = Dataset(X, y)
        try:
            validate(ds)
        except DuplicateRow:
            continue
        return ds


def centered_scores(rng: random.Random, n: int, hi: int = 3) -> tuple:
    a = sorted(Fraction(rng.randint(-hi, hi), rng.choice((1, 2))) for _ in range(n))
    mean = sum(a) / n
    return tuple(v - mean for v in a)
