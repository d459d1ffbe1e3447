import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from rankopt.errors import DuplicateRow
from rankopt.model import Dataset, validate

COLLINEAR = Dataset([[1], [2], [3]], [1, 2, 3])
COLLINEAR_ALPHA = (-1, 0, 1)


def random_instance(rng: random.Random, n: int, p: int, num_bits: int = 8, dens=(1, 2, 3)) -> Dataset:
    """Random rational instance without duplicate rows."""
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


def random_scores(rng: random.Random, n: int, zero_sum: bool = False, hi: int = 3) -> tuple:
    a = sorted(Fraction(rng.randint(-hi, hi), rng.choice((1, 2))) for _ in range(n))
    if zero_sum:
        # subtract the mean: keeps the order, makes the sum vanish
        mean = sum(a) / n
        a = [v - mean for v in a]
    return tuple(a)


def random_point(rng: random.Random, p: int, hi: int = 20) -> list:
    return [Fraction(rng.randint(-hi * 8, hi * 8), rng.choice((1, 2, 4, 8))) for _ in range(p)]


@pytest.fixture
def rng():
    return random.Random(20240601)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)


@st.composite
def datasets(draw, n_min=2, n_max=6, p_min=1, p_max=3):
    n = draw(st.integers(n_min, n_max))
    p = draw(st.integers(p_min, p_max))
    X = draw(st.lists(st.lists(rationals, min_size=p, max_size=p), min_size=n, max_size=n))
    y = draw(st.lists(rationals, min_size=n, max_size=n))
    return Dataset(X, y)


@st.composite
def instances(draw, n_max=6, p_max=3, zero_sum=None):
    """(dataset, alpha) with nondecreasing alpha."""
    ds = draw(datasets(n_max=n_max, p_max=p_max))
    alpha = sorted(draw(st.lists(st.fractions(-5, 5, max_denominator=4), min_size=ds.n, max_size=ds.n)))
    if zero_sum is True:
        mean = sum(alpha) / ds.n
        alpha = [a - mean for a in alpha]
    return ds, tuple(alpha)
