import random
from fractions import Fraction

import pytest

from rankopt.errors import OracleImpure, PermutationLimitExceeded
from rankopt.gen_solver import _CheckedOracle, minimize_gen, minimize_gen_bruteforce
from rankopt.model import Dataset, eval_F, score_oracle
from rankopt.reference import brute_min

from conftest import COLLINEAR, COLLINEAR_ALPHA, random_instance, random_point, random_scores


def test_collinear_minimum():
    sol = minimize_gen(COLLINEAR, score_oracle(COLLINEAR_ALPHA))
    assert sol.status == "minimum" and sol.value == 0 and sol.minimizer == [1]
    assert sol.stats["lps"] == sol.stats["cells"] == 2
    brute = minimize_gen_bruteforce(COLLINEAR, score_oracle(COLLINEAR_ALPHA))
    assert (brute.status, brute.value, brute.minimizer) == ("minimum", 0, [1])
    assert brute.stats["candidates"] == 6 and brute.stats["cells"] == 2


def test_zero_oracle():
    sol = minimize_gen(COLLINEAR, lambda pi: (0, 0, 0))
    assert sol.status == "minimum" and sol.value == 0


def test_constant_oracle_unbounded():
    ds = Dataset([[1], [2]], [0, 0])
    assert minimize_gen(ds, lambda pi: (1, 2)).status == "unbounded"
    assert brute_min(ds, lambda pi: (1, 2)).status == "unbounded"


def test_impure_oracle_detected():
    calls = iter(range(100))
    oracle = _CheckedOracle(lambda pi: (0, 0, next(calls)), None)
    oracle((0, 1, 2))
    with pytest.raises(OracleImpure):
        oracle((0, 1, 2))


def test_coefficient_cap_warns(caplog):
    with caplog.at_level("WARNING"):
        minimize_gen(COLLINEAR, lambda pi: (Fraction(1, 3 ** 40), 0, 0), coefficient_bit_cap=10)
    assert "cap 10" in caplog.text


def test_permutation_cap():
    big = Dataset([[i] for i in range(8)], [i * i for i in range(8)])
    with pytest.raises(PermutationLimitExceeded):
        minimize_gen_bruteforce(big, score_oracle(range(8)))


def test_agrees_with_bruteforce_on_general_oracles():
    rng = random.Random(2)
    for _ in range(40):
        n, p = rng.randint(3, 5), rng.randint(1, 3)
        ds = random_instance(rng, n, p, num_bits=5)
        table = {}

        def oracle(pi, table=table, n=n):
            # arbitrary (non-convex) pi-dependent coefficients, fixed per pi
            if pi not in table:
                r = random.Random(hash(pi) ^ 77)
                table[pi] = [Fraction(r.randint(-3, 3), r.choice((1, 2))) for _ in range(n)]
            return table[pi]

        a, b = minimize_gen(ds, oracle), minimize_gen_bruteforce(ds, oracle)
        assert a.status == b.status
        if a.status == "minimum":
            assert a.value == b.value
            assert a.stats["lps"] == a.stats["cells"]


def test_value_is_a_lower_bound():
    rng = random.Random(9)
    for _ in range(10):
        ds = random_instance(rng, 5, 2, num_bits=5)
        alpha = random_scores(rng, 5, zero_sum=True)
        sol = minimize_gen(ds, score_oracle(alpha))
        assert sol.status == "minimum"
        assert eval_F(ds, alpha, sol.minimizer) == sol.value
        for _ in range(100):
            assert eval_F(ds, alpha, random_point(rng, 2)) >= sol.value
