"""YES/NO oracle for ``exists beta: W beta <= z and F(beta) <= t`` (convex F).

Central-cut ellipsoid method on the blown-up set

    P' = {b : W b <= z + 2^-q1 e,  F(b) <= t + 2^-q1}

started from the smallest ball around the box ``[-2^q3, 2^q3]^p``.  Membership
and separation are exact: the center is an mpfr vector, hence a dyadic
rational, and F is evaluated on it in integer arithmetic.  YES answers carry a
certified witness.  NO answers rely on the iteration budget
``ceil((2p+2) ln(V0 2^q2))``.  The shape matrix is inflated by ``1 + 2^-40``
after every cut to absorb rounding, and its positive definiteness is checked
each step.  A run starts at a precision sized for the volume range and is
repeated with doubled precision if E stops being positive definite (or
``s^T E s`` rounds to zero for a nonzero cut), up to a
ceiling that covers the worst-case eigenvalue spread of the whole budget.

For ``p = 1`` the ellipsoid is an interval and the central cut is exact
bisection on dyadic integers.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from .errors import DegenerateDirection, InternalInvariant, PrecisionExhausted
from .exact_numeric import BoundSet, as_fraction, compute_bounds
from .model import Dataset, ScoreVector, eval_F, subgradient

__all__ = [
    "OracleQuery",
    "OracleAnswer",
    "Ellipsoid",
    "central_cut",
    "membership",
    "separator",
    "oracle_A",
    "oracle_A_star",
    "iteration_budget",
    "working_precision",
    "precision_ceiling",
]

INFLATE_BITS = 40

log = logging.getLogger(__name__)


@dataclass
class OracleQuery:
    dataset: Dataset
    alpha: ScoreVector
    t: Fraction
    W: list = field(default_factory=list)
    z: list = field(default_factory=list)

    def __post_init__(self):
        if not isinstance(self.alpha, ScoreVector):
            self.alpha = ScoreVector(tuple(self.alpha))
        self.t = as_fraction(self.t)
        self.W = [[as_fraction(v) for v in row] for row in self.W]
        self.z = [as_fraction(v) for v in self.z]
        if len(self.W) != len(self.z):
            raise ValueError("W and z disagree in length")


@dataclass
class OracleAnswer:
    yes: bool
    witness: Optional[list] = None
    iterations: int = 0
    budget: int = 0
    reason: str = ""
    precision: int = 0  # mantissa bits of the final pass (0 for exact bisection)

    @property
    def verdict(self) -> str:
        return "YES" if self.yes else "NO"


@dataclass
class Ellipsoid:
    """``{b : (b - c)^T E^-1 (b - c) <= 1}``; entries are mpfr (or Fractions)."""

    center: list
    shape: list

    @property
    def dim(self) -> int:
        return len(self.center)

    def det(self):
        return _det(self.shape)


def _det(A):
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    M = [list(row) for row in A]
    d = 1
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(M[r][c]))
        if M[piv][c] == 0:
            return 0 * d
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d = d * M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            for k in range(c, n):
                M[r][k] -= f * M[c][k]
    return d


def _positive_definite(A) -> bool:
    """Cholesky test at the current mpfr precision."""
    n = len(A)
    L = [[mpfr(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = A[i][j] - sum((L[i][k] * L[j][k] for k in range(j)), mpfr(0))
            if i == j:
                if not s > 0:
                    return False
                L[i][i] = gmpy2.sqrt(s)
            else:
                L[i][j] = s / L[j][j]
    return True


def central_cut(e: Ellipsoid, s: Sequence) -> Ellipsoid:
    """Minimum-volume ellipsoid containing ``e`` intersected with ``(b - c) . s <= 0``.

    ``E' = p^2/(p^2-1) (E - 2/(p+1) E s s^T E / s^T E s)``,
    ``c' = c - E s / ((p+1) sqrt(s^T E s))``; for ``p = 1`` the half interval.
    Arithmetic is mpfr at the current gmpy2 context precision.
    """
    E = [[mpfr(v) for v in row] for row in e.shape]
    c = [mpfr(v) for v in e.center]
    s = [_to_mpfr(v) for v in s]
    p = len(c)
    Es = [sum((E[i][k] * s[k] for k in range(p)), mpfr(0)) for i in range(p)]
    sEs = sum((s[i] * Es[i] for i in range(p)), mpfr(0))
    if not sEs > 0:
        raise DegenerateDirection("s^T E s is not positive at working precision")
    root = gmpy2.sqrt(sEs)
    b = [v / root for v in Es]
    if p == 1:
        return Ellipsoid([c[0] - b[0] / 2], [[E[0][0] / 4]])
    c_new = [ci - bi / (p + 1) for ci, bi in zip(c, b)]
    scale = mpfr(p * p) / (p * p - 1)
    w = mpfr(2) / (p + 1)
    E_new = [[None] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            E_new[i][j] = E_new[j][i] = scale * (E[i][j] - w * b[i] * b[j])
    return Ellipsoid(c_new, E_new)


def _to_mpfr(v):
    if isinstance(v, Fraction):
        return mpfr(v.numerator) / v.denominator
    return mpfr(v)


# -- exact membership / separation on rational points (reference route) ---------


def membership(query: OracleQuery, c, q1: int) -> bool:
    """``c`` in P' (exact)."""
    c = [as_fraction(v) for v in c]
    delta = Fraction(1, 2 ** q1)
    for row, zi in zip(query.W, query.z):
        if sum((a * b for a, b in zip(row, c)), Fraction(0)) > zi + delta:
            return False
    return eval_F(query.dataset, query.alpha, c) <= query.t + delta


def separator(query: OracleQuery, c, q1: int) -> list:
    """Cut direction at a non-member ``c``: first violated row of W, else the subgradient."""
    c = [as_fraction(v) for v in c]
    delta = Fraction(1, 2 ** q1)
    for row, zi in zip(query.W, query.z):
        if sum((a * b for a, b in zip(row, c)), Fraction(0)) > zi + delta:
            return list(row)
    if eval_F(query.dataset, query.alpha, c) <= query.t + delta:
        raise InternalInvariant("separator called on a member point")
    return subgradient(query.dataset, query.alpha, c)


# -- fast exact kernel on dyadic points -----------------------------------------


class _Kernel:
    """Integer-scaled copy of a query; evaluates points ``m / 2^E`` exactly."""

    def __init__(self, query: OracleQuery, q1: int):
        ds = query.dataset
        d = 1
        for v in [v for row in ds.X for v in row] + list(ds.y):
            d = math.lcm(d, v.denominator)
        da = 1
        for a in query.alpha.alpha:
            da = math.lcm(da, a.denominator)
        self.X = [[int(v * d) for v in row] for row in ds.X]
        self.Y = [int(v * d) for v in ds.y]
        self.A = [int(a * da) for a in query.alpha.alpha]
        self.scale = d * da
        self.q1 = q1
        t = query.t
        # F <= t + 2^-q1  <=>  S * td * 2^q1 <= (tn * 2^q1 + td) * scale * 2^E
        self.t_lhs = t.denominator << q1
        self.t_rhs = ((t.numerator << q1) + t.denominator) * self.scale
        self.rows = []
        for row, zi in zip(query.W, query.z):
            dr = zi.denominator
            for v in row:
                dr = math.lcm(dr, v.denominator)
            ints = [int(v * dr) for v in row]
            self.rows.append((ints, (int(zi * dr) << q1) + dr, list(row)))
        self.p = ds.p

    def evaluate(self, M, E):
        """Return ``(member, s)`` for the point ``M / 2^E`` (``s`` unnormalized)."""
        q1 = self.q1
        for ints, rhs, row in self.rows:
            lhs = sum(a * m for a, m in zip(ints, M)) << q1
            if lhs > rhs << E:
                return False, row
        r = [yi << E for yi in self.Y]
        for i, xi in enumerate(self.X):
            r[i] -= sum(x * m for x, m in zip(xi, M))
        order = sorted(range(len(r)), key=r.__getitem__)
        S = 0
        s = [0] * self.p
        for a, i in zip(self.A, order):
            if a:
                S += a * r[i]
                for j, x in enumerate(self.X[i]):
                    s[j] -= a * x
        if S * self.t_lhs <= self.t_rhs << E:
            return True, None
        return False, s


def _dyadic(values):
    """Exact ``(M, E)`` with ``values[j] == M[j] / 2^E`` for mpfr inputs."""
    parts = [v.as_mantissa_exp() for v in values]
    E = max(0, max(-int(e) for _, e in parts))
    return [int(m) << (int(e) + E) for m, e in parts], E


def _log2_initial_volume(p: int, bounds: BoundSet) -> float:
    return (math.log2(math.pi) * p / 2 - math.lgamma(p / 2 + 1) / math.log(2)
            + p * (0.5 * math.log2(p) + bounds.q3_L))


def iteration_budget(p: int, bounds: BoundSet) -> int:
    """``ceil((2p+2) ln(V0 2^q2))`` with V0 the volume of the starting ball.

    For ``p = 1`` every step halves the interval exactly, so
    ``log2(V0 2^q2) + 1`` steps already push its length below ``2^-q2``.
    """
    if p == 1:
        return bounds.q3_L + bounds.q2_L + 2
    return math.ceil((2 * p + 2) * math.log(2) * (_log2_initial_volume(p, bounds) + bounds.q2_L))


def working_precision(bounds: BoundSet, precision: int, p: int = 2) -> int:
    """Starting mantissa bits for the shape matrix.

    Enough when the eigenvalues of E spread by no more than the volume can
    shrink within the budget, ``(V0 2^q2)^2``, plus a 64-bit margin.
    """
    spread = 2 * math.ceil(_log2_initial_volume(p, bounds) + bounds.q2_L) + 2 * bounds.q3_L
    return max(precision, spread + 64)


def precision_ceiling(p: int, budget: int, bounds: BoundSet) -> int:
    """Mantissa bits that cover the worst case of ``budget`` cuts.

    One cut stretches E by at most ``p^2/(p^2-1)`` and shrinks it by at most
    ``p^2/(p+1)^2``, so the condition number grows by ``(p+1)/(p-1)`` per cut.
    """
    growth = math.log2((p + 1) / (p - 1))
    return math.ceil(budget * growth) + 2 * bounds.q3_L + 2 * INFLATE_BITS + 64


def _query_lipschitz(query: OracleQuery, bounds: BoundSet) -> int:
    lip = bounds.lipschitz
    for row in query.W:
        lip = max(lip, math.isqrt(math.ceil(sum(v * v for v in row))) + 1)
    return lip


def oracle_A(query: OracleQuery, bounds: Optional[BoundSet] = None,
             precision: int = 256, max_iter: Optional[int] = None) -> OracleAnswer:
    """Decide whether ``{W b <= z, F(b) <= t}`` is nonempty.

    ``bounds`` defaults to :func:`compute_bounds` of the query data.  Raises
    :class:`PrecisionExhausted` if the shape matrix loses positive
    definiteness at the working precision.
    """
    if not query.alpha.nondecreasing:
        raise ValueError("score coefficients must be nondecreasing")
    if bounds is None:
        bounds = compute_bounds(query.dataset, query.alpha)
    p = query.dataset.p
    budget = iteration_budget(p, bounds) if max_iter is None else max_iter
    lip = _query_lipschitz(query, bounds)
    if lip > bounds.lipschitz:
        # caller-supplied rows with larger norms need a larger volume exponent
        extra = p * (lip.bit_length() - bounds.lipschitz.bit_length())
        bounds = BoundSet(bounds.L, bounds.q_L, bounds.q1_L, bounds.q2_L + extra, bounds.q3_L,
                          lip, bounds.hadamard, bounds.fast)
        if max_iter is None:
            budget = iteration_budget(p, bounds)
    kernel = _Kernel(query, bounds.q1_L)
    if p == 1:
        return _bisect_1d(kernel, bounds, budget)
    prec = working_precision(bounds, precision, p)
    ceiling = max(prec, precision_ceiling(p, budget, bounds))
    while True:
        answer = _ellipsoid_run(kernel, bounds, p, budget, prec)
        if answer is not None:
            answer.precision = prec
            return answer
        if prec >= ceiling:
            raise PrecisionExhausted(f"shape matrix not positive definite at {prec} bits")
        log.debug("shape matrix lost definiteness at %d bits; retrying", prec)
        prec = min(2 * prec, ceiling)


def _ellipsoid_run(kernel, bounds, p, budget, prec) -> Optional[OracleAnswer]:
    """One pass of the central-cut loop; ``None`` if E stops being positive definite."""
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        r2 = mpfr(p) * mpfr(2) ** (2 * bounds.q3_L)
        c = [mpfr(0)] * p
        E = [[r2 if i == j else mpfr(0) for j in range(p)] for i in range(p)]
        step = _Stepper(p)
        for it in range(budget):
            M, X = _dyadic(c)
            member, s = kernel.evaluate(M, X)
            if member:
                return OracleAnswer(True, [Fraction(m, 1 << X) for m in M], it, budget, "member")
            if not any(s):
                # zero cut: violated zero row, or F(b) >= F(c) > t + 2^-q1 everywhere
                return OracleAnswer(False, None, it, budget, "certified-empty")
            if not step(c, E, s):
                return None
    return OracleAnswer(False, None, budget, budget, "budget")


class _Stepper:
    """In-place central cut plus inflation and definiteness check (hot loop)."""

    def __init__(self, p: int):
        self.p = p
        self.scale = mpfr(p * p) / (p * p - 1) * (1 + mpfr(2) ** -INFLATE_BITS)
        self.w = mpfr(2) / (p + 1)
        self.inv = mpfr(1) / (p + 1)

    def __call__(self, c, E, s) -> bool:
        p = self.p
        if p == 2:
            s0, s1 = mpfr(s[0]), mpfr(s[1])
            e00, e01, e11 = E[0][0], E[0][1], E[1][1]
            g0 = e00 * s0 + e01 * s1
            g1 = e01 * s0 + e11 * s1
            sEs = s0 * g0 + s1 * g1
            if not sEs > 0:
                return False  # s != 0 here, so E has lost definiteness
            root = gmpy2.sqrt(sEs)
            b0, b1 = g0 / root, g1 / root
            c[0] -= b0 * self.inv
            c[1] -= b1 * self.inv
            sc, w = self.scale, self.w
            e00 = sc * (e00 - w * b0 * b0)
            e01 = sc * (e01 - w * b0 * b1)
            e11 = sc * (e11 - w * b1 * b1)
            E[0][0], E[0][1], E[1][0], E[1][1] = e00, e01, e01, e11
            return e00 > 0 and e00 * e11 - e01 * e01 > 0
        ms = [mpfr(v) for v in s]
        g = [sum((E[i][k] * ms[k] for k in range(p) if s[k]), mpfr(0)) for i in range(p)]
        sEs = sum((ms[i] * g[i] for i in range(p)), mpfr(0))
        if not sEs > 0:
            return False
        root = gmpy2.sqrt(sEs)
        b = [v / root for v in g]
        for i in range(p):
            c[i] -= b[i] * self.inv
            for j in range(i, p):
                E[i][j] = E[j][i] = self.scale * (E[i][j] - self.w * b[i] * b[j])
        return _positive_definite(E)


def _bisect_1d(kernel: _Kernel, bounds: BoundSet, budget: int) -> OracleAnswer:
    # interval [lo, hi] / 2^E kept as integers; the midpoint lives at scale 2^(E+1)
    lo, hi, E = -(1 << bounds.q3_L), 1 << bounds.q3_L, 0
    for it in range(budget):
        mid, E = lo + hi, E + 1
        member, s = kernel.evaluate([mid], E)
        if member:
            return OracleAnswer(True, [Fraction(mid, 1 << E)], it, budget, "member")
        if not s[0]:
            return OracleAnswer(False, None, it, budget, "certified-empty")
        if s[0] > 0:
            lo, hi = 2 * lo, mid
        else:
            lo, hi = mid, 2 * hi
    return OracleAnswer(False, None, budget, budget, "budget")


def oracle_A_star(dataset: Dataset, alpha, t, bounds: Optional[BoundSet] = None,
                  precision: int = 256, max_iter: Optional[int] = None) -> OracleAnswer:
    """``oracle_A`` with the trivial constraint row ``0 . b <= 0``."""
    query = OracleQuery(dataset, alpha, t, [[0] * dataset.p], [0])
    return oracle_A(query, bounds, precision, max_iter)
