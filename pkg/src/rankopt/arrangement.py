"""The arrangement of residual-tie hyperplanes and output-sensitive cell enumeration.

``H_ij = {beta : (x_i - x_j) . beta = y_i - y_j}`` for ``i < j``.  Pairs with
``x_i == x_j`` never tie (their residual gap is constant) and are left out of
the arrangement.  Coinciding hyperplanes are grouped into classes; the
lexicographically first pair of a class represents it and every other member
goes to the redundancy list.

Cells are enumerated by a recursive incremental search over tight hyperplanes:
each call sorts residuals at an interior point, emits the cell, and for every
candidate facet not yet used on the current branch solves one small LP; a
positive optimum yields a point on the far side via ray shooting and a
recursive call.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .errors import InternalInvariant
from .exact_numeric import as_fraction
from .lp_exact import EQ, LE, LinearProgram, LpStatus, solve
from .model import Dataset, validate

__all__ = [
    "Hyperplane",
    "Arrangement",
    "TightnessResult",
    "EnumerationStats",
    "build_hyperplanes",
    "cell_of",
    "find_interior_point",
    "candidate_tight_pairs",
    "tightness_test",
    "enumerate_cells",
    "count_neighbors",
    "zeta",
    "segments_2d",
]

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Hyperplane:
    i: int
    j: int
    normal: tuple  # x_i - x_j
    offset: Fraction  # y_i - y_j

    @property
    def pair(self) -> tuple:
        return (self.i, self.j)

    def value(self, beta) -> Fraction:
        """``(x_i - x_j) . beta - (y_i - y_j)``; zero exactly on the hyperplane."""
        return sum((a * b for a, b in zip(self.normal, beta) if a), _ZERO) - self.offset


def _canonical(normal, offset):
    lead = next(v for v in normal if v)
    return tuple(v / lead for v in normal), offset / lead


@dataclass
class Arrangement:
    dataset: Dataset
    hyperplanes: list  # nonempty hyperplanes, one per pair, lexicographic
    redundant: frozenset  # pairs dominated by an identical earlier hyperplane
    empty_pairs: frozenset  # x_i == x_j: constant residual gap
    representative: dict = field(default_factory=dict)  # pair -> class representative
    by_pair: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def p(self) -> int:
        return self.dataset.p

    def classes(self) -> list:
        """Representative hyperplanes, i.e. the arrangement without duplicates."""
        return [h for h in self.hyperplanes if h.pair not in self.redundant]

    def pair_key(self, a: int, b: int) -> tuple:
        return (a, b) if a < b else (b, a)


def build_hyperplanes(dataset: Dataset) -> Arrangement:
    """All C(n,2) pair hyperplanes, the redundancy list and duplicate classes."""
    validate(dataset)
    X, y, n = dataset.X, dataset.y, dataset.n
    hyperplanes, empty = [], set()
    keyed = []
    for i in range(n):
        for j in range(i + 1, n):
            normal = tuple(a - b for a, b in zip(X[i], X[j]))
            if not any(normal):
                empty.add((i, j))
                continue
            h = Hyperplane(i, j, normal, y[i] - y[j])
            hyperplanes.append(h)
            keyed.append((_canonical(normal, h.offset), h.pair))
    keyed.sort()
    representative, redundant = {}, set()
    prev_key, rep = None, None
    for key, pair in keyed:
        if key != prev_key:
            prev_key, rep = key, pair
        else:
            redundant.add(pair)
        representative[pair] = rep
    return Arrangement(
        dataset=dataset,
        hyperplanes=hyperplanes,
        redundant=frozenset(redundant),
        empty_pairs=frozenset(empty),
        representative=representative,
        by_pair={h.pair: h for h in hyperplanes},
    )


def _residuals(dataset: Dataset, beta) -> list:
    return [yi - sum((a * b for a, b in zip(row, beta) if a), _ZERO)
            for row, yi in zip(dataset.X, dataset.y)]


def cell_of(arr: Arrangement, beta) -> Optional[tuple]:
    """Ascending residual order at ``beta``, or ``None`` if ``beta`` lies on a hyperplane."""
    beta = [as_fraction(b) for b in beta]
    r = _residuals(arr.dataset, beta)
    pi = tuple(sorted(range(arr.n), key=r.__getitem__))
    for a, b in zip(pi, pi[1:]):
        if r[a] == r[b]:
            return None  # ties on empty pairs are impossible, so this is a boundary
    return pi


def find_interior_point(arr: Arrangement, start=None, seed: int = 0) -> list:
    """``start`` (default: origin) nudged deterministically off every hyperplane.

    The nudge is ``2^-k (1, d, d^2, ...)`` with ``d`` chosen so that the
    direction is transversal to every hyperplane through ``start``; ``k`` grows
    until no residual tie remains.
    """
    p = arr.p
    base = [as_fraction(b) for b in start] if start is not None else [_ZERO] * p
    if cell_of(arr, base) is not None:
        return base
    through = [h for h in arr.classes() if h.value(base) == 0]
    m = 3 + seed
    while True:
        d = Fraction(1, m)
        v = [d ** k for k in range(p)]
        if all(sum((a * b for a, b in zip(h.normal, v)), _ZERO) != 0 for h in through):
            break
        m += 1
    step = Fraction(1)
    while True:
        beta = [b + step * vk for b, vk in zip(base, v)]
        if cell_of(arr, beta) is not None:
            return beta
        step /= 2


def candidate_tight_pairs(arr: Arrangement, pi) -> list:
    """Hyperplane classes met by adjacent pairs of ``pi``, as representative pairs.

    Adjacent pairs with a constant gap are dropped, as are repeats of a class
    already listed (this is where redundant pairs are filtered out).
    """
    out, seen = [], set()
    for a, b in zip(pi, pi[1:]):
        pair = arr.pair_key(a, b)
        if pair in arr.empty_pairs:
            continue
        rep = arr.representative[pair]
        if rep not in seen:
            seen.add(rep)
            out.append(rep)
    return out


@dataclass
class TightnessResult:
    tight: bool
    epsilon: Optional[Fraction] = None  # LP optimum (capped at 1), None if infeasible
    beta_star: Optional[list] = None  # point of the facet found by the LP
    beta0: Optional[list] = None  # interior point of the neighbour cell


def _gap_row(dataset: Dataset, a: int, b: int):
    """Row/rhs of ``r_a + eps <= r_b`` over variables ``(beta, eps)``."""
    xa, xb = dataset.X[a], dataset.X[b]
    return [u - v for u, v in zip(xb, xa)] + [Fraction(1)], dataset.y[b] - dataset.y[a]


def tightness_lp(arr: Arrangement, pi, pair) -> LinearProgram:
    """``max eps`` on the hyperplane of ``pair`` within the closed cell of ``pi``.

    Adjacent gaps of the same hyperplane class as ``pair`` are dropped (they
    vanish on it); every other adjacent gap of a nonempty hyperplane must be at
    least ``eps``.  ``eps <= 1`` keeps the LP bounded without changing its sign.
    """
    ds, p = arr.dataset, arr.p
    rep = arr.representative[arr.pair_key(*pair)]
    lp = LinearProgram([_ZERO] * p + [Fraction(1)])
    for a, b in zip(pi, pi[1:]):
        key = arr.pair_key(a, b)
        if key in arr.empty_pairs or arr.representative[key] == rep:
            continue
        row, rhs = _gap_row(ds, a, b)
        lp.add(row, LE, rhs)
    h = arr.by_pair[rep]
    lp.add(list(h.normal) + [_ZERO], EQ, h.offset)
    lp.add([_ZERO] * p + [Fraction(1)], LE, Fraction(1))
    return lp


def _shoot(arr: Arrangement, witness, beta_star, rep) -> list:
    """Point just past ``beta_star`` on the ray from ``witness``.

    Midway between ``beta_star`` (parameter 1) and the next hyperplane hit; if
    nothing else is hit, a full step beyond ``beta_star``.
    """
    direction = [s - w for s, w in zip(beta_star, witness)]
    nxt = None
    for h in arr.classes():
        h0, h1 = h.value(witness), h.value(beta_star)
        if h0 == h1:
            continue
        lam = h0 / (h0 - h1)
        if h.pair == rep:
            if lam != 1:
                raise InternalInvariant("facet point is not on the tested hyperplane")
            continue
        if lam <= 1 and lam > 0:
            raise InternalInvariant(f"ray leaves the cell through {h.pair} before the facet")
        if lam > 1 and (nxt is None or lam < nxt):
            nxt = lam
    t = (1 + nxt) / 2 if nxt is not None else Fraction(2)
    return [w + t * d for w, d in zip(witness, direction)]


def tightness_test(arr: Arrangement, pi, pair, witness=None) -> TightnessResult:
    """Is the hyperplane of ``pair`` a facet of the cell ``pi``?  If so, also
    return an interior point of the neighbour across it."""
    pair = arr.pair_key(*pair)
    if pair in arr.empty_pairs:
        return TightnessResult(False)
    out = solve(tightness_lp(arr, pi, pair))
    if out.status is LpStatus.INFEASIBLE:
        return TightnessResult(False)
    eps = out.value
    if eps <= 0:
        return TightnessResult(False, epsilon=eps)
    if witness is None:
        witness = interior_witness(arr, pi)
    beta_star = out.x[: arr.p]
    beta0 = _shoot(arr, witness, beta_star, arr.representative[pair])
    return TightnessResult(True, epsilon=eps, beta_star=beta_star, beta0=beta0)


def interior_witness(arr: Arrangement, pi) -> Optional[list]:
    """Chebyshev-like interior point of cell ``pi`` (``None`` if not full-dimensional)."""
    ds, p = arr.dataset, arr.p
    lp = LinearProgram([_ZERO] * p + [Fraction(1)])
    for a, b in zip(pi, pi[1:]):
        row, rhs = _gap_row(ds, a, b)
        lp.add(row, LE, rhs)
    lp.add([_ZERO] * p + [Fraction(1)], LE, Fraction(1))
    out = solve(lp)
    if out.status is not LpStatus.OPTIMAL or out.value <= 0:
        return None
    return out.x[:p]


def count_neighbors(arr: Arrangement, pi, witness=None) -> int:
    return sum(tightness_test(arr, pi, pair, witness).tight
               for pair in candidate_tight_pairs(arr, pi))


@dataclass
class EnumerationStats:
    cells: int = 0
    lps: int = 0
    max_depth: int = 0
    max_tight_per_cell: int = 0


def enumerate_cells(
    arrangement,
    sink: Callable[[tuple, list], None],
    start=None,
    seed: int = 0,
) -> EnumerationStats:
    """Stream every cell ``(pi, witness)`` of the arrangement to ``sink`` exactly once.

    ``arrangement`` may be a :class:`Dataset` or a prebuilt :class:`Arrangement`.
    Memory holds only the current recursion branch; cells are not stored.
    """
    arr = arrangement if isinstance(arrangement, Arrangement) else build_hyperplanes(arrangement)
    stats = EnumerationStats()
    beta = find_interior_point(arr, start, seed)
    depth_cap = arr.n * (arr.n - 1) // 2
    limit = sys.getrecursionlimit()
    if depth_cap + 50 > limit:
        sys.setrecursionlimit(depth_cap + 100)

    def visit(beta, tight_list, depth):
        pi = cell_of(arr, beta)
        if pi is None:
            raise InternalInvariant("recursion reached a boundary point")
        sink(pi, beta)
        stats.cells += 1
        stats.max_depth = max(stats.max_depth, depth)
        found = 0
        for rep in candidate_tight_pairs(arr, pi):
            if rep in tight_list:
                continue
            stats.lps += 1
            res = tightness_test(arr, pi, rep, beta)
            if res.tight:
                found += 1
                tight_list = tight_list | {rep}
                visit(res.beta0, tight_list, depth + 1)
        stats.max_tight_per_cell = max(stats.max_tight_per_cell, found)

    visit(beta, frozenset(), 0)
    return stats


def zeta(N: int, p: int) -> int:
    """Upper bound ``sum_{i<=p} C(N, i)`` on the cell count of N hyperplanes in R^p."""
    if N < 0 or p < 0:
        raise ValueError("N and p must be nonnegative")
    return sum(math.comb(N, i) for i in range(p + 1))


def _line_box(normal, offset, bound):
    """Clip ``a . b = c`` (2-D) to the square ``[-bound, bound]^2``."""
    (a1, a2), c = normal, offset
    pts = []
    for fixed in (-bound, bound):
        if a2:
            v = (c - a1 * fixed) / a2
            if -bound <= v <= bound:
                pts.append((fixed, v))
        if a1:
            u = (c - a2 * fixed) / a1
            if -bound <= u <= bound:
                pts.append((u, fixed))
    pts = sorted(set(pts))
    return (pts[0], pts[-1]) if len(pts) >= 2 else None


def segments_2d(arr: Arrangement, bound=None) -> list:
    """Hyperplane segments of a p=2 arrangement clipped to a box holding all vertices."""
    if arr.p != 2:
        raise ValueError("segment output needs p = 2")
    classes = arr.classes()
    if bound is None:
        far = Fraction(1)
        for k, g in enumerate(classes):
            c2 = g.normal[0] ** 2 + g.normal[1] ** 2
            far = max(far, abs(g.offset) * (abs(g.normal[0]) + abs(g.normal[1])) / c2)
            for h in classes[k + 1:]:
                det = g.normal[0] * h.normal[1] - g.normal[1] * h.normal[0]
                if det:
                    u = (g.offset * h.normal[1] - g.normal[1] * h.offset) / det
                    v = (g.normal[0] * h.offset - g.offset * h.normal[0]) / det
                    far = max(far, abs(u), abs(v))
        bound = 2 * far
    out = []
    for h in classes:
        seg = _line_box(h.normal, h.offset, bound)
        if seg is not None:
            out.append((h.pair, seg))
    return out
