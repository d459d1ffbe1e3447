import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankopt.errors import DimensionMismatch, DuplicateRow, PermutationLimitExceeded
from rankopt.model import (
    Dataset,
    ScoreVector,
    eval_F,
    eval_F_maxform,
    eval_cell_objective,
    residuals,
    score_coefficients,
    score_oracle,
    subgradient,
    validate,
)

from conftest import COLLINEAR, COLLINEAR_ALPHA, instances, rationals

INTERCEPT = Dataset([[1], [1], [1]], [3, 1, 2])


def test_validate():
    validate(Dataset([[1], [2]], [1, 1]))
    validate(Dataset([[1], [1]], [1, 2]))
    with pytest.raises(DuplicateRow, match="duplicate rows 1 and 2"):
        validate(Dataset([[1], [1]], [2, 2]))


def test_dataset_shape_checks():
    with pytest.raises(DimensionMismatch):
        Dataset([[1]], [1])
    with pytest.raises(DimensionMismatch):
        Dataset([[1], [1, 2]], [1, 2])
    with pytest.raises(DimensionMismatch):
        Dataset([[1], [2]], [1, 2, 3])


def test_sign_scores():
    assert score_coefficients("sign", 4).alpha == (-1, -1, 1, 1)
    assert score_coefficients("sign", 3).alpha == (-1, 0, 1)


def test_wilcoxon_scores():
    a = score_coefficients("wilcoxon", 3)
    assert a[1] == 0 and a[0] == -a[2]
    assert abs(a[2] - Fraction(math.sqrt(3) / 2)) < Fraction(1, 2 ** 50)
    assert a[2] ** 2 <= Fraction(3, 4) < (a[2] + Fraction(1, 2 ** 64)) ** 2


def test_vdw_scores():
    a = score_coefficients("vdw", 4)
    assert a.nondecreasing and a.zero_sum
    assert abs(float(a[3]) - 0.8416212335729143) < 1e-15
    assert score_coefficients("vdw", 5)[2] == 0


@pytest.mark.parametrize("kind", ["sign", "wilcoxon", "vdw"])
@pytest.mark.parametrize("n", [2, 3, 7, 10])
def test_scores_nondecreasing_and_centered(kind, n):
    a = score_coefficients(kind, n)
    assert a.nondecreasing and a.zero_sum and len(a) == n


def test_unknown_score():
    with pytest.raises(ValueError):
        score_coefficients("huber", 4)


def test_residuals():
    assert residuals(COLLINEAR, [1]) == [0, 0, 0]
    assert residuals(COLLINEAR, [0]) == [1, 2, 3]
    assert residuals(COLLINEAR, [2]) == [-1, -2, -3]


def test_eval_F_examples():
    assert eval_F(INTERCEPT, COLLINEAR_ALPHA, [0]) == 2
    assert eval_F(Dataset([[0], [1], [2]], [1, 1, 2]), COLLINEAR_ALPHA, [0]) == 1
    for b in (-3, 0, Fraction(7, 2)):
        assert eval_F(INTERCEPT, COLLINEAR_ALPHA, [b]) == 2


def test_maxform_examples():
    assert eval_F_maxform(INTERCEPT, COLLINEAR_ALPHA, [0]) == 2
    assert eval_F_maxform(COLLINEAR, (0, 0, 0), [5]) == 0
    big = Dataset([[i] for i in range(8)], [0] * 8)
    with pytest.raises(PermutationLimitExceeded):
        eval_F_maxform(big, [0] * 8, [0])


def test_subgradient_examples():
    assert subgradient(COLLINEAR, COLLINEAR_ALPHA, [0]) == [-2]
    assert subgradient(COLLINEAR, (0, 0, 0), [0]) == [0]
    s = subgradient(COLLINEAR, COLLINEAR_ALPHA, [1])
    for b in range(-5, 6):
        assert eval_F(COLLINEAR, COLLINEAR_ALPHA, [b]) >= s[0] * (b - 1)


def test_tie_invariance():
    ds = Dataset([[0], [0], [0], [1]], [1, 1, 2, 5])  # residuals tie at beta = 0
    alpha = (-2, -1, 1, 2)
    r = residuals(ds, [0])
    values = set()
    for pi in itertools.permutations(range(4)):
        if all(r[a] <= r[b] for a, b in zip(pi, pi[1:])):
            values.add(sum(a * r[i] for a, i in zip(alpha, pi)))
    assert values == {eval_F(ds, alpha, [0])}


def test_score_oracle_matches_F():
    oracle = score_oracle(COLLINEAR_ALPHA)
    assert oracle((2, 0, 1)) == [0, 1, -1]
    pi = (0, 1, 2)
    assert eval_cell_objective(COLLINEAR, oracle(pi), [0]) == eval_F(COLLINEAR, COLLINEAR_ALPHA, [0])


def test_score_vector_flags():
    assert ScoreVector((-1, 0, 1)).zero_sum
    assert not ScoreVector((1, 0)).nondecreasing


@st.composite
def point(draw, p):
    return draw(st.lists(rationals, min_size=p, max_size=p))


@settings(max_examples=150, deadline=None)
@given(instances(), st.data())
def test_maxform_equivalence(inst, data):
    ds, alpha = inst
    b = data.draw(point(ds.p))
    assert eval_F(ds, alpha, b) == eval_F_maxform(ds, alpha, b)


@settings(max_examples=150, deadline=None)
@given(instances(), st.data(), st.fractions(0, 1, max_denominator=10))
def test_convexity(inst, data, lam):
    ds, alpha = inst
    b1, b2 = data.draw(point(ds.p)), data.draw(point(ds.p))
    mid = [lam * u + (1 - lam) * v for u, v in zip(b1, b2)]
    assert eval_F(ds, alpha, mid) <= lam * eval_F(ds, alpha, b1) + (1 - lam) * eval_F(ds, alpha, b2)


@settings(max_examples=150, deadline=None)
@given(instances(zero_sum=True), st.data())
def test_nonnegative_when_zero_sum(inst, data):
    ds, alpha = inst
    assert eval_F(ds, alpha, data.draw(point(ds.p))) >= 0


@settings(max_examples=150, deadline=None)
@given(instances(), st.data())
def test_subgradient_inequality(inst, data):
    ds, alpha = inst
    b, beta = data.draw(point(ds.p)), data.draw(point(ds.p))
    s = subgradient(ds, alpha, beta)
    lin = sum(si * (u - v) for si, u, v in zip(s, b, beta))
    assert eval_F(ds, alpha, b) >= eval_F(ds, alpha, beta) + lin
