import itertools
import random
from fractions import Fraction

import pytest

from rankopt.errors import DimensionMismatch, InconsistentSystem
from rankopt.lp_exact import EQ, LE, LinearProgram, LpStatus, check_feasible, solve, solve_equalities


def test_single_bound():
    out = solve(LinearProgram([1]).add([1], LE, 1))
    assert out.status is LpStatus.OPTIMAL and out.value == 1


def test_free_objective_is_unbounded():
    out = solve(LinearProgram([1]))
    assert out.status is LpStatus.UNBOUNDED
    assert out.ray == [1]


def test_contradictory_bounds():
    lp = LinearProgram([0]).add([1], LE, 0).add([-1], LE, -1)
    assert solve(lp).status is LpStatus.INFEASIBLE


def test_equalities_and_nonneg():
    # max x + y  s.t. x + 2y == 4, x <= 3, x, y >= 0  ->  x = 3, y = 1/2
    lp = LinearProgram([1, 1], nonneg=frozenset({0, 1}))
    lp.add([1, 2], EQ, 4).add([1, 0], LE, 3)
    out = solve(lp)
    assert out.status is LpStatus.OPTIMAL
    assert out.x == [3, Fraction(1, 2)] and out.value == Fraction(7, 2)


def test_row_length_checked():
    with pytest.raises(DimensionMismatch):
        LinearProgram([1, 2]).add([1], LE, 0)


def test_solve_equalities_examples():
    assert solve_equalities([[-1]], [-1]) == [1]
    assert solve_equalities([], [], 2) == [0, 0]
    with pytest.raises(InconsistentSystem):
        solve_equalities([[1, 0], [1, 0]], [1, 2])


def test_solve_equalities_free_variables_zero():
    # x + y = 2 with y free -> (2, 0)
    assert solve_equalities([[1, 1]], [2]) == [2, 0]


def _vertex_optimum(c, rows, rhs):
    """Best objective over vertices of {A x <= b} in R^d (bounded instances)."""
    d = len(c)
    best = None
    for combo in itertools.combinations(range(len(rows)), d):
        try:
            x = solve_equalities([rows[i] for i in combo], [rhs[i] for i in combo], d)
        except InconsistentSystem:
            continue
        if _rank([rows[i] for i in combo]) < d:  # not a vertex
            continue
        if all(sum(a * v for a, v in zip(r, x)) <= b for r, b in zip(rows, rhs)):
            val = sum(a * v for a, v in zip(c, x))
            best = val if best is None else max(best, val)
    return best


def _rank(rows):
    M = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    for col in range(len(M[0]) if M else 0):
        piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col] / M[rank][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def test_matches_vertex_enumeration():
    rng = random.Random(7)
    for _ in range(150):
        d = rng.randint(1, 3)
        rows = [[Fraction(rng.randint(-4, 4)) for _ in range(d)] for _ in range(rng.randint(1, 6))]
        rhs = [Fraction(rng.randint(-3, 6)) for _ in rows]
        # box keeps everything bounded
        for k in range(d):
            e = [0] * d
            e[k] = 1
            rows.append(list(e))
            rhs.append(Fraction(10))
            e[k] = -1
            rows.append(list(e))
            rhs.append(Fraction(10))
        c = [Fraction(rng.randint(-5, 5)) for _ in range(d)]
        lp = LinearProgram(c)
        for r, b in zip(rows, rhs):
            lp.add(r, LE, b)
        out = solve(lp)
        ref = _vertex_optimum(c, rows, rhs)
        if ref is None:
            assert out.status is LpStatus.INFEASIBLE
        else:
            assert out.status is LpStatus.OPTIMAL
            assert out.value == ref
            assert check_feasible(lp, out.x)


def test_degenerate_instances_terminate():
    # many constraints through the origin: classic cycling bait
    rng = random.Random(1)
    for _ in range(100):
        d = rng.randint(2, 4)
        lp = LinearProgram([Fraction(rng.randint(-3, 3)) for _ in range(d)],
                           nonneg=frozenset(range(d)))
        for _ in range(rng.randint(d, 3 * d)):
            lp.add([Fraction(rng.randint(-2, 2)) for _ in range(d)], LE, 0)
        lp.add([1] * d, LE, 1)
        out = solve(lp)
        assert out.status is LpStatus.OPTIMAL
        assert check_feasible(lp, out.x)
