"""Exact rational simplex (two-phase, Bland's rule).

The LPs in this package are tiny (at most a few dozen constraints, a handful
of variables) but their answers feed strict ``eps > 0`` tests, so pivoting is
exact.  The tableau uses ``gmpy2.mpq``; inputs and outputs are Fractions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from gmpy2 import mpq

from .errors import DimensionMismatch, InconsistentSystem

__all__ = [
    "LE",
    "EQ",
    "LinearProgram",
    "LpStatus",
    "LpOutcome",
    "solve",
    "solve_equalities",
    "check_feasible",
]

LE = "<="
EQ = "=="

_ZERO = Fraction(0)
_ONE = Fraction(1)
# tableau arithmetic runs on gmpy2 rationals; results are handed back as Fractions
_QZERO = mpq(0)
_QONE = mpq(1)


def _q(v) -> mpq:
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


def _f(v: mpq) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class LpStatus(Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass
class LinearProgram:
    """``maximize objective . x`` subject to ``row . x (<= | ==) rhs``.

    Variables are free unless their index is listed in ``nonneg``.
    """

    objective: Sequence
    constraints: list = field(default_factory=list)
    nonneg: frozenset = frozenset()

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add(self, row, rel, rhs):
        if len(row) != self.num_vars:
            raise DimensionMismatch(f"row of length {len(row)} for {self.num_vars} variables")
        if rel not in (LE, EQ):
            raise ValueError(f"unknown relation {rel!r}")
        self.constraints.append((list(row), rel, rhs))
        return self


@dataclass
class LpOutcome:
    status: LpStatus
    value: Optional[Fraction] = None
    x: Optional[list] = None
    ray: Optional[list] = None  # feasible improving direction when unbounded


def check_feasible(lp: LinearProgram, x) -> bool:
    for row, rel, rhs in lp.constraints:
        lhs = sum((Fraction(a) * v for a, v in zip(row, x) if a), _ZERO)
        if rel == LE and lhs > rhs:
            return False
        if rel == EQ and lhs != rhs:
            return False
    return all(x[j] >= 0 for j in lp.nonneg)


class _Tableau:
    """Dense tableau for ``A z = b, z >= 0`` with an explicit basis."""

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, c):
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            prow = [v * inv if v else v for v in prow]
            self.rows[r] = prow
            self.rhs[r] *= inv
        nz = [j for j, v in enumerate(prow) if v]
        brhs = self.rhs[r]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
                self.rhs[i] -= f * brhs
        self.basis[r] = c

    def optimize(self, cost, allowed):
        """Maximize ``cost . z`` over columns in ``allowed``; Bland's rule.

        Returns ``None`` at optimum, or the entering column of an unbounded ray.
        """
        while True:
            # reduced costs c_j - c_B B^-1 A_j, computed from the current rows
            cb = [cost[b] for b in self.basis]
            enter = None
            for j in allowed:
                if j in self._basic:
                    continue
                d = cost[j]
                for i, row in enumerate(self.rows):
                    if cb[i] and row[j]:
                        d -= cb[i] * row[j]
                if d > 0:
                    enter = j
                    break
            if enter is None:
                return None
            leave = None
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return enter
            self._basic.discard(self.basis[leave])
            self.pivot(leave, enter)
            self._basic.add(enter)

    def run(self, cost, allowed):
        self._basic = set(self.basis)
        return self.optimize(cost, allowed)


def solve(lp: LinearProgram) -> LpOutcome:
    """Exact optimum of ``lp`` (maximization)."""
    nv = lp.num_vars
    # column layout: for free var j -> (plus, minus); nonneg var -> single
    col_of = []
    ncols = 0
    for j in range(nv):
        if j in lp.nonneg:
            col_of.append((ncols, None))
            ncols += 1
        else:
            col_of.append((ncols, ncols + 1))
            ncols += 2
    nstruct = ncols
    m = len(lp.constraints)
    n_slack = sum(1 for _, rel, _ in lp.constraints if rel == LE)
    total = nstruct + n_slack + m  # artificials last
    rows, rhs, basis = [], [], []
    slack = nstruct
    art = nstruct + n_slack
    art_cols = []
    for k, (row, rel, b) in enumerate(lp.constraints):
        z = [_QZERO] * total
        for j, a in enumerate(row):
            if not a:
                continue
            a = _q(a)
            plus, minus = col_of[j]
            z[plus] = a
            if minus is not None:
                z[minus] = -a
        b = _q(b)
        slack_col = None
        if rel == LE:
            slack_col = slack
            z[slack] = _QONE
            slack += 1
        if b < 0:
            z = [-v for v in z]
            b = -b
        if slack_col is not None and z[slack_col] == 1:
            basis.append(slack_col)
        else:
            z[art] = _QONE
            basis.append(art)
            art_cols.append(art)
            art += 1
        rows.append(z)
        rhs.append(b)
    total = art
    for z in rows:
        del z[total:]
    tab = _Tableau(rows, rhs, basis)
    real_cols = list(range(nstruct + n_slack))

    if art_cols:
        cost1 = [_QZERO] * total
        for a in art_cols:
            cost1[a] = -_QONE
        tab.run(cost1, list(range(total)))
        infeas = sum((tab.rhs[i] for i, b in enumerate(tab.basis) if b in art_cols), _QZERO)
        if infeas > 0:
            return LpOutcome(LpStatus.INFEASIBLE)
        # drive zero-level artificials out of the basis or drop redundant rows
        art_set = set(art_cols)
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] in art_set:
                col = next((j for j in real_cols if tab.rows[i][j]), None)
                if col is None:
                    del tab.rows[i], tab.rhs[i], tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1

    cost = [_QZERO] * total
    for j, c in enumerate(lp.objective):
        if c:
            c = _q(c)
            plus, minus = col_of[j]
            cost[plus] = c
            if minus is not None:
                cost[minus] = -c
    ray_col = tab.run(cost, real_cols)

    def recover(z):
        out = []
        for plus, minus in col_of:
            v = z[plus]
            if minus is not None:
                v -= z[minus]
            out.append(_f(v))
        return out

    zval = [_QZERO] * total
    for i, b in enumerate(tab.basis):
        zval[b] = tab.rhs[i]
    x = recover(zval)
    if ray_col is not None:
        d = [_QZERO] * total
        d[ray_col] = _QONE
        for i, b in enumerate(tab.basis):
            d[b] = -tab.rows[i][ray_col]
        return LpOutcome(LpStatus.UNBOUNDED, x=x, ray=recover(d))
    value = sum((Fraction(c) * v for c, v in zip(lp.objective, x) if c), _ZERO)
    return LpOutcome(LpStatus.OPTIMAL, value=value, x=x)


def solve_equalities(W, z, num_vars: Optional[int] = None) -> list:
    """Exact solution of ``W b = z`` by Gauss-Jordan; free variables are 0."""
    rows = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(W, z)]
    if len(W) != len(z):
        raise DimensionMismatch("W and z disagree in length")
    if num_vars is None:
        if not rows:
            raise DimensionMismatch("num_vars required for an empty system")
        num_vars = len(rows[0]) - 1
    pivots = []
    r = 0
    for c in range(num_vars):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1]:
            raise InconsistentSystem(f"row {i + 1} reduces to 0 = {rows[i][-1]}")
    beta = [_ZERO] * num_vars
    for i, c in enumerate(pivots):
        beta[c] = rows[i][-1]
    return beta
