"""Exact rational helpers: bitsizes, explicit Big-L bounds, Diophantine snapping.

All quantities are :class:`fractions.Fraction` (canonical coprime form with a
positive denominator), so nothing here touches binary floating point.

The bound polynomials of the ellipsoid argument are existential in the
literature; :func:`compute_bounds` instantiates them with explicit, conservative
Hadamard/Cramer estimates.  They are implementation choices, not tight values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch

__all__ = [
    "as_fraction",
    "bitsize",
    "vector_bitsize",
    "instance_bitsize",
    "BoundSet",
    "compute_bounds",
    "diophantine_approx",
    "continued_fraction",
    "sqrt_upper",
]


def as_fraction(value) -> Fraction:
    """Exact conversion; strings may be ``"p/q"`` or decimals like ``"-0.125"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def bitsize(r) -> int:
    """Bits to write ``r`` as sign + numerator + denominator.

    ``ceil(log2(|num|+1)) + ceil(log2(den+1)) + 1``, with at least one bit
    for the numerator so that zero costs 3 bits like +-1 does.
    """
    r = as_fraction(r)
    num_bits = max(1, abs(r.numerator).bit_length())
    return num_bits + r.denominator.bit_length() + 1


def vector_bitsize(values: Iterable) -> int:
    return sum(bitsize(v) for v in values)


def instance_bitsize(X: Sequence[Sequence], y: Sequence, alpha: Sequence) -> int:
    """``L``: total bitsize of the regression data plus score coefficients."""
    n = len(y)
    if n == 0 or len(alpha) == 0:
        raise DimensionMismatch("empty instance")
    if len(X) != n or len(alpha) != n:
        raise DimensionMismatch(f"X has {len(X)} rows, y has {n}, alpha has {len(alpha)}")
    p = len(X[0])
    if p == 0 or any(len(row) != p for row in X):
        raise DimensionMismatch("ragged or empty design matrix")
    return sum(vector_bitsize(row) for row in X) + vector_bitsize(y) + vector_bitsize(alpha)


def sqrt_upper(x: Fraction) -> int:
    """Smallest integer ``m`` with ``m*m >= x`` (for ``x >= 0``)."""
    x = Fraction(x)
    c = -(-x.numerator // x.denominator)  # ceil(x)
    m = math.isqrt(c)
    return m if m * m >= c else m + 1


def _lcm_denominators(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, v.denominator)
    return d


def _primitive_row(row: Sequence[Fraction]) -> list[int]:
    den = _lcm_denominators(row)
    ints = [int(v * den) for v in row]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints] if g > 1 else ints


def _ceil(x: Fraction) -> int:
    return -(-x.numerator // x.denominator)


@dataclass(frozen=True)
class BoundSet:
    """Explicit bit bounds driving the ellipsoid-based solver.

    ``q_L`` bounds the bitsize of every arrangement vertex (and a point of every
    face) and of the optimum; it also guarantees ``|t0| <= 2**q_L`` and
    ``den(t0) <= 2**q_L``.  ``q1_L`` is the blow-up exponent, ``q2_L`` the
    volume exponent of the blown-up polyhedron and ``q3_L`` the half-side
    exponent of the starting box.  ``lipschitz`` upper-bounds the Euclidean
    norm of every constraint normal the solver can produce.
    """

    L: int
    q_L: int
    q1_L: int
    q2_L: int
    q3_L: int
    lipschitz: int
    hadamard: int
    fast: bool = False


def _log2_unit_ball_deficit(p: int) -> int:
    # ceil(-log2(volume of the unit p-ball)), clipped at zero
    vol = math.pi ** (p / 2) / math.gamma(p / 2 + 1)
    return max(0, math.ceil(-math.log2(vol)) + 1)


def compute_bounds(dataset, alpha, *, fast: bool = False) -> BoundSet:
    """Conservative explicit bounds for ``(X, y, alpha)``.

    ``dataset`` needs ``X`` and ``y`` attributes; ``alpha`` is a sequence or
    anything with an ``alpha`` attribute.  With ``fast=True`` the vertex-bitsize
    term is dropped and ``q_L`` only covers the magnitude/denominator of ``t0``.
    """
    X = [[as_fraction(v) for v in row] for row in dataset.X]
    y = [as_fraction(v) for v in dataset.y]
    alpha = [as_fraction(a) for a in getattr(alpha, "alpha", alpha)]
    L = instance_bitsize(X, y, alpha)
    n, p = len(y), len(X[0])

    d_xy = _lcm_denominators([v for row in X for v in row] + y)
    d_alpha = _lcm_denominators(alpha)
    abs_alpha = sum(abs(a) for a in alpha)
    y_max = max(abs(v) for v in y)
    x_max = max(abs(v) for row in X for v in row)
    x_row1 = max(sum(abs(v) for v in row) for row in X)

    # integer-scaled hyperplane rows (normal | offset)
    max_row_norm2 = 1
    max_normal_norm2 = Fraction(0)
    for i in range(n):
        for j in range(i + 1, n):
            normal = [a - b for a, b in zip(X[i], X[j])]
            if not any(normal):
                continue
            row = _primitive_row(normal + [y[i] - y[j]])
            max_row_norm2 = max(max_row_norm2, sum(v * v for v in row))
            max_normal_norm2 = max(max_normal_norm2, sum(v * v for v in normal))
    row_norm = sqrt_upper(Fraction(max_row_norm2))
    hadamard = row_norm ** p  # bounds every Cramer numerator and denominator

    mag = abs_alpha * (y_max + x_row1 * hadamard)
    den = d_alpha * d_xy * hadamard
    q_t = max(_ceil(mag).bit_length(), den.bit_length(), 1)
    if fast:
        q = q_t
    else:
        hb = hadamard.bit_length()
        vertex_bits = p * (max(1, hb) + hb + 1)
        t0_bits = max(1, (_ceil(mag) * den).bit_length()) + den.bit_length() + 1
        q = max(vertex_bits, t0_bits, q_t)

    # blow-up: must separate t0 from bisection midpoints (den <= 2^(2q+1)),
    # and keep an infeasible face-loop system infeasible (Farkas, Hadamard)
    s_f = d_alpha * d_xy * 2 ** q
    a_ent = max(_ceil(abs_alpha * x_max * s_f), row_norm, 1)
    b_ent = max(_ceil((2 ** q + abs_alpha * y_max) * s_f), row_norm, 1)
    farkas = sqrt_upper(Fraction(p + 1)) ** (p + 1) * a_ent ** p * b_ent
    farkas_bits = ((p + 1) * farkas * max(s_f, d_xy)).bit_length() + 1
    q1 = max(3 * q + 2, farkas_bits)

    x_norm = sqrt_upper(max(sum(v * v for v in row) for row in X))
    lipschitz = max(_ceil(abs_alpha) * x_norm, sqrt_upper(max_normal_norm2), 1)
    q2 = p * (q1 + lipschitz.bit_length()) + _log2_unit_ball_deficit(p)
    q3 = 3 * q + 4
    return BoundSet(L=L, q_L=q, q1_L=q1, q2_L=q2, q3_L=q3,
                    lipschitz=lipschitz, hadamard=hadamard, fast=fast)


def continued_fraction(gamma) -> list[int]:
    """Finite continued-fraction expansion ``[a0; a1, a2, ...]`` of a rational."""
    gamma = as_fraction(gamma)
    num, den = gamma.numerator, gamma.denominator
    terms = []
    while den:
        a, r = divmod(num, den)
        terms.append(a)
        num, den = den, r
    return terms


def diophantine_approx(gamma, M: int) -> Optional[Fraction]:
    """The unique ``rho/theta`` with ``1 <= theta <= M`` and
    ``|gamma - rho/theta| < 1/(2 M^2)``, or ``None`` if there is none.

    Any such fraction also satisfies ``|gamma - rho/theta| < 1/(2 theta^2)``,
    so by Legendre's theorem it is a convergent of ``gamma``; it suffices to
    scan convergents with denominator at most ``M``.
    """
    if M < 1:
        raise ValueError("M must be a positive integer")
    gamma = as_fraction(gamma)
    tol = Fraction(1, 2 * M * M)
    h_prev, h = 1, None
    k_prev, k = 0, None
    for a in continued_fraction(gamma):
        if h is None:
            h, k = a, 1
        else:
            h, h_prev = a * h + h_prev, h
            k, k_prev = a * k + k_prev, k
        if k > M:
            break
        cand = Fraction(h, k)
        if abs(gamma - cand) < tol:
            return cand
    return None
