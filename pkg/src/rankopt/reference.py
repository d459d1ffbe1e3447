"""Brute-force ground truth for small instances.

Nothing here shares code with the arrangement search or the ellipsoid solver
beyond the exact LP kernel; it exists only to certify them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import PermutationLimitExceeded
from .lp_exact import LE, LinearProgram, LpStatus, solve
from .model import Dataset, ScoreVector, eval_cell_objective, score_oracle

__all__ = ["brute_cells", "brute_vertices", "brute_min", "BruteResult", "DEFAULT_CAP"]

DEFAULT_CAP = 7
_ZERO = Fraction(0)


def _adjacent_rows(dataset: Dataset, pi, with_eps: bool):
    for a, b in zip(pi, pi[1:]):
        row = [u - v for u, v in zip(dataset.X[b], dataset.X[a])]
        if with_eps:
            row.append(Fraction(1))
        yield row, dataset.y[b] - dataset.y[a]


def _is_cell(dataset: Dataset, pi) -> bool:
    lp = LinearProgram([_ZERO] * dataset.p + [Fraction(1)])
    for row, rhs in _adjacent_rows(dataset, pi, True):
        lp.add(row, LE, rhs)
    out = solve(lp)
    return out.status is LpStatus.UNBOUNDED or (out.status is LpStatus.OPTIMAL and out.value > 0)


def brute_cells(dataset: Dataset, cap: int = DEFAULT_CAP) -> set:
    """Every permutation whose ordering region has nonempty interior."""
    if dataset.n > cap:
        raise PermutationLimitExceeded(dataset.n, cap)
    return {pi for pi in itertools.permutations(range(dataset.n)) if _is_cell(dataset, pi)}


def _solve_square(A, b) -> Optional[list]:
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for c in range(n):
        pr = next((r for r in range(c, n) if M[r][c]), None)
        if pr is None:
            return None
        M[c], M[pr] = M[pr], M[c]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [u - f * v for u, v in zip(M[r], M[c])]
    return [M[r][n] / M[r][r] for r in range(n)]


def brute_vertices(dataset: Dataset) -> set:
    """Intersections of p hyperplanes with independent normals, deduplicated."""
    X, y, n, p = dataset.X, dataset.y, dataset.n, dataset.p
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            normal = [a - b for a, b in zip(X[i], X[j])]
            if any(normal):
                rows.append((normal, y[i] - y[j]))
    out = set()
    for combo in itertools.combinations(rows, p):
        v = _solve_square([r for r, _ in combo], [c for _, c in combo])
        if v is not None:
            out.add(tuple(v))
    return out


@dataclass
class BruteResult:
    status: str  # "minimum" | "unbounded"
    value: Optional[Fraction] = None
    minimizer: Optional[list] = None
    pi: Optional[tuple] = None


def brute_min(dataset: Dataset, coefficients, cap: int = DEFAULT_CAP) -> BruteResult:
    """Exhaustive minimum of the cell-wise linear objective.

    ``coefficients`` is either a score vector (sequence / :class:`ScoreVector`)
    or a callable oracle ``pi -> a``.  Each full-dimensional cell contributes
    the minimum of its linear piece over the closed cell.
    """
    if dataset.n > cap:
        raise PermutationLimitExceeded(dataset.n, cap)
    oracle = coefficients if callable(coefficients) else score_oracle(
        coefficients.alpha if isinstance(coefficients, ScoreVector) else coefficients)
    best = None
    for pi in itertools.permutations(range(dataset.n)):
        if not _is_cell(dataset, pi):
            continue
        a = [Fraction(v) for v in oracle(pi)]
        grad = [sum((ai * row[j] for ai, row in zip(a, dataset.X)), _ZERO) for j in range(dataset.p)]
        lp = LinearProgram(grad)  # maximize sum a_i x_i . beta == minimize the objective
        for row, rhs in _adjacent_rows(dataset, pi, False):
            lp.add(row, LE, rhs)
        out = solve(lp)
        if out.status is LpStatus.UNBOUNDED:
            return BruteResult("unbounded", pi=pi)
        val = eval_cell_objective(dataset, a, out.x)
        if best is None or val < best.value:
            best = BruteResult("minimum", val, out.x, pi)
    return best
