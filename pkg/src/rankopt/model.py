"""Regression instance, score coefficients and exact evaluation of F.

Indices are 0-based throughout the Python API.  A permutation ``pi`` is a tuple
listing observation indices in ascending residual order, so ``pi[k]`` is the
observation holding rank ``k``.

F(beta) = sum_k alpha_k * r_{pi(k)}(beta) with pi sorting the residuals
``r_i = y_i - x_i . beta`` ascending.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .errors import DimensionMismatch, DuplicateRow, PermutationLimitExceeded
from .exact_numeric import as_fraction

__all__ = [
    "Dataset",
    "ScoreVector",
    "CoefficientOracle",
    "validate",
    "score_coefficients",
    "score_oracle",
    "residuals",
    "ascending_order",
    "eval_F",
    "eval_F_maxform",
    "eval_cell_objective",
    "subgradient",
    "DEFAULT_PERMUTATION_CAP",
]

DEFAULT_PERMUTATION_CAP = 7

# pi -> (a_1, ..., a_n); must depend on pi only
CoefficientOracle = Callable[[tuple], Sequence]


@dataclass(frozen=True)
class Dataset:
    X: tuple
    y: tuple

    def __post_init__(self):
        X = tuple(tuple(as_fraction(v) for v in row) for row in self.X)
        y = tuple(as_fraction(v) for v in self.y)
        if len(y) < 2:
            raise DimensionMismatch("need at least two observations")
        if len(X) != len(y):
            raise DimensionMismatch(f"X has {len(X)} rows but y has {len(y)} entries")
        p = len(X[0])
        if p < 1 or any(len(row) != p for row in X):
            raise DimensionMismatch("design matrix must be rectangular with p >= 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return len(self.X[0])


def validate(dataset: Dataset) -> None:
    """Raise :class:`DuplicateRow` (1-based indices) if two rows of (X|y) coincide."""
    seen = {}
    for i, (row, yi) in enumerate(zip(dataset.X, dataset.y)):
        key = row + (yi,)
        if key in seen:
            raise DuplicateRow(seen[key] + 1, i + 1)
        seen[key] = i


@dataclass(frozen=True)
class ScoreVector:
    """Score coefficients; the monotonicity and zero-sum flags are derived."""

    alpha: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(as_fraction(a) for a in self.alpha))

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def nondecreasing(self) -> bool:
        return all(a <= b for a, b in zip(self.alpha, self.alpha[1:]))

    @property
    def zero_sum(self) -> bool:
        return sum(self.alpha) == 0

    def __iter__(self):
        return iter(self.alpha)

    def __len__(self):
        return len(self.alpha)

    def __getitem__(self, k):
        return self.alpha[k]


def _alpha(alpha) -> tuple:
    if isinstance(alpha, ScoreVector):
        return alpha.alpha
    return tuple(as_fraction(a) for a in alpha)


def _truncate(x: mpmath.mpf, bits: int) -> Fraction:
    # round toward zero: monotone and odd, so symmetric scores stay symmetric
    m = int(mpmath.floor(abs(x) * mpmath.mpf(2) ** bits))
    return Fraction(m if x >= 0 else -m, 2 ** bits)


def score_coefficients(kind: str, n: int, precision: int = 64) -> ScoreVector:
    """``alpha_i = phi(i/(n+1))`` for the sign, Wilcoxon or van der Waerden score.

    Irrational values are truncated toward zero to ``precision`` fractional
    bits; the result is treated as exact from then on.  The van der Waerden
    score uses the standard normal quantile ``Phi^-1(t)``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    ts = [Fraction(i, n + 1) for i in range(1, n + 1)]
    half = Fraction(1, 2)
    if kind == "sign":
        alpha = [Fraction((t > half) - (t < half)) for t in ts]
    elif kind == "wilcoxon":
        alpha = []
        scale = 4 ** precision
        for t in ts:
            v = t - half
            sq = 12 * v * v * scale
            m = math.isqrt(sq.numerator // sq.denominator)
            alpha.append(Fraction(m if v >= 0 else -m, 2 ** precision))
    elif kind in ("vdw", "van_der_waerden"):
        with mpmath.workprec(precision + 64):
            alpha = []
            for t in ts:
                if t == half:
                    alpha.append(Fraction(0))
                    continue
                x = mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(t.numerator) / t.denominator - 1)
                alpha.append(_truncate(x, precision))
    else:
        raise ValueError(f"unknown score {kind!r}")
    return ScoreVector(tuple(alpha))


def score_oracle(alpha) -> CoefficientOracle:
    """GEN oracle induced by scores: observation ``pi[k]`` receives ``alpha[k]``."""
    alpha = _alpha(alpha)

    def oracle(pi):
        a = [None] * len(pi)
        for k, i in enumerate(pi):
            a[i] = alpha[k]
        return a

    return oracle


def residuals(dataset: Dataset, beta) -> list:
    beta = [as_fraction(b) for b in beta]
    if len(beta) != dataset.p:
        raise DimensionMismatch(f"beta has length {len(beta)}, expected {dataset.p}")
    return [yi - sum((a * b for a, b in zip(row, beta) if a), Fraction(0))
            for row, yi in zip(dataset.X, dataset.y)]


def ascending_order(r) -> tuple:
    """A permutation sorting ``r`` ascending (ties by index)."""
    return tuple(sorted(range(len(r)), key=r.__getitem__))


def eval_F(dataset: Dataset, alpha, beta) -> Fraction:
    alpha = _alpha(alpha)
    r = sorted(residuals(dataset, beta))
    return sum((a * v for a, v in zip(alpha, r)), Fraction(0))


def eval_F_maxform(dataset: Dataset, alpha, beta, cap: int = DEFAULT_PERMUTATION_CAP) -> Fraction:
    """``max_pi sum_k alpha_k r_{pi(k)}`` by enumerating all of S_n."""
    if dataset.n > cap:
        raise PermutationLimitExceeded(dataset.n, cap)
    alpha = _alpha(alpha)
    r = residuals(dataset, beta)
    return max(sum((a * r[i] for a, i in zip(alpha, pi)), Fraction(0))
               for pi in itertools.permutations(range(dataset.n)))


def eval_cell_objective(dataset: Dataset, a, beta) -> Fraction:
    """``sum_i a_i (y_i - x_i . beta)`` for coefficients indexed by observation."""
    r = residuals(dataset, beta)
    return sum((as_fraction(ai) * ri for ai, ri in zip(a, r)), Fraction(0))


def subgradient(dataset: Dataset, alpha, beta) -> list:
    """``-sum_k alpha_k x_{pi(k)}`` for an ascending residual order at ``beta``."""
    alpha = _alpha(alpha)
    pi = ascending_order(residuals(dataset, beta))
    s = [Fraction(0)] * dataset.p
    for a, i in zip(alpha, pi):
        if a:
            for j, xij in enumerate(dataset.X[i]):
                s[j] -= a * xij
    return s
