"""Exact minimization of continuous convex rank objectives.

Steps: an unboundedness probe at ``t = -2^q - 1``; bisection of
``[-2^q, 2^q]`` with the YES/NO oracle until the bracket is narrower than
``2^(-2q-1)``; Diophantine snapping of the bracket midpoint to the unique
fraction with denominator at most ``2^q`` (the optimum); then a greedy pass
over all pairs ``i < j`` that keeps a tie constraint ``r_i = r_j`` whenever
the optimum is still attainable with it.  Any solution of the kept equations
is a minimizer.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .ellipsoid import OracleQuery, oracle_A, oracle_A_star
from .errors import InconsistentSystem, SnapFailed
from .exact_numeric import BoundSet, compute_bounds, diophantine_approx
from .lp_exact import EQ, LinearProgram, LpStatus, solve, solve_equalities
from .model import Dataset, ScoreVector, eval_F, residuals, validate

__all__ = ["CccSolution", "minimize_ccc", "verify_optimality"]

log = logging.getLogger(__name__)


@dataclass
class CccSolution:
    status: str  # "minimum" | "unbounded"
    t0: Optional[Fraction] = None
    beta0: Optional[list] = None
    W: list = field(default_factory=list)
    z: list = field(default_factory=list)
    face_pairs: list = field(default_factory=list)
    bounds: Optional[BoundSet] = None
    stats: dict = field(default_factory=dict)


def _as_scores(alpha) -> ScoreVector:
    return alpha if isinstance(alpha, ScoreVector) else ScoreVector(tuple(alpha))


def _solve(dataset, alpha, bounds, precision, on_bracket):
    q = bounds.q_L
    stats = {"oracle_calls": 0, "bisection_steps": 0, "cuts": 0}

    def ask_star(t):
        ans = oracle_A_star(dataset, alpha, t, bounds, precision)
        stats["oracle_calls"] += 1
        stats["cuts"] += ans.iterations
        return ans

    if ask_star(-(Fraction(2) ** q) - 1).yes:
        return CccSolution("unbounded", bounds=bounds, stats=stats)

    hi, lo = Fraction(2) ** q, -(Fraction(2) ** q)
    width = Fraction(1, 2 ** (2 * q + 1))
    while hi - lo > width:
        mid = (hi + lo) / 2
        if ask_star(mid).yes:
            hi = mid
        else:
            lo = mid
        stats["bisection_steps"] += 1
        if on_bracket is not None:
            on_bracket(lo, hi)

    t0 = diophantine_approx((hi + lo) / 2, 2 ** q)
    if t0 is None:
        raise SnapFailed(f"no fraction with denominator <= 2^{q} near the bracket [{lo}, {hi}]")

    X, y, n = dataset.X, dataset.y, dataset.n
    W, z, pairs = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            row = [a - b for a, b in zip(X[i], X[j])]
            off = y[i] - y[j]
            W_try, z_try = W + [row], z + [off]
            query = OracleQuery(dataset, alpha, t0,
                                W_try + [[-v for v in r] for r in W_try],
                                z_try + [-v for v in z_try])
            ans = oracle_A(query, bounds, precision)
            stats["oracle_calls"] += 1
            stats["cuts"] += ans.iterations
            if ans.yes:
                W, z = W_try, z_try
                pairs.append((i, j))

    try:
        beta0 = solve_equalities(W, z, dataset.p)
    except InconsistentSystem as exc:
        raise SnapFailed(f"face system is inconsistent: {exc}") from exc
    value = eval_F(dataset, alpha, beta0)
    if value != t0:
        raise SnapFailed(f"F(beta0) = {value} differs from the snapped optimum {t0}")
    return CccSolution("minimum", t0, beta0, W, z, pairs, bounds, stats)


def minimize_ccc(dataset: Dataset, alpha, *, fast: bool = False, precision: int = 256,
                 on_bracket: Optional[Callable] = None) -> CccSolution:
    """Exact minimum ``t0`` and a minimizer ``beta0`` of the rank objective.

    ``alpha`` must be nondecreasing.  ``fast=True`` runs first with the smaller
    bound that only covers the optimum's magnitude and denominator, checks the
    result with :func:`verify_optimality`, and falls back to the full bounds if
    anything fails.  ``on_bracket(lo, hi)`` is called after each bisection step.
    """
    validate(dataset)
    alpha = _as_scores(alpha)
    if len(alpha) != dataset.n:
        raise ValueError(f"need {dataset.n} score coefficients, got {len(alpha)}")
    if not alpha.nondecreasing:
        raise ValueError("score coefficients must be nondecreasing")
    if fast:
        bounds = compute_bounds(dataset, alpha, fast=True)
        try:
            sol = _solve(dataset, alpha, bounds, precision, on_bracket)
            if sol.status == "unbounded" or verify_optimality(dataset, alpha, sol.beta0):
                sol.stats["mode"] = "fast"
                return sol
            log.warning("fast mode result failed verification; rerunning with full bounds")
        except SnapFailed as exc:
            log.warning("fast mode snap failed (%s); rerunning with full bounds", exc)
    sol = _solve(dataset, alpha, compute_bounds(dataset, alpha), precision, on_bracket)
    sol.stats["mode"] = "rigorous"
    return sol


def verify_optimality(dataset: Dataset, alpha, beta0) -> bool:
    """Is 0 a subgradient of F at ``beta0``?

    The subdifferential is the convex hull of ``-sum_k alpha_k x_{pi(k)}`` over
    orders ``pi`` consistent with the residual ties at ``beta0``.  Within each
    tie block the assignment of ranks to observations ranges over the Birkhoff
    polytope, so membership of 0 is a feasibility LP in doubly-stochastic
    block weights.
    """
    alpha = _as_scores(alpha).alpha
    r = residuals(dataset, beta0)
    order = sorted(range(dataset.n), key=r.__getitem__)
    p = dataset.p
    fixed = [Fraction(0)] * p
    blocks = []
    k = 0
    while k < len(order):
        m = k
        while m + 1 < len(order) and r[order[m + 1]] == r[order[k]]:
            m += 1
        if m == k:
            for j in range(p):
                fixed[j] += alpha[k] * dataset.X[order[k]][j]
        else:
            blocks.append((order[k:m + 1], list(range(k, m + 1))))
        k = m + 1
    if not blocks:
        return not any(fixed)
    # variables: one weight per (observation, rank) inside each block
    var = []
    for obs, ranks in blocks:
        for i in obs:
            for pos in ranks:
                var.append((i, pos))
    index = {v: t for t, v in enumerate(var)}
    lp = LinearProgram([0] * len(var), nonneg=frozenset(range(len(var))))
    for obs, ranks in blocks:
        for i in obs:
            row = [0] * len(var)
            for pos in ranks:
                row[index[(i, pos)]] = 1
            lp.add(row, EQ, 1)
        for pos in ranks:
            row = [0] * len(var)
            for i in obs:
                row[index[(i, pos)]] = 1
            lp.add(row, EQ, 1)
    for j in range(p):
        row = [alpha[pos] * dataset.X[i][j] for i, pos in var]
        lp.add(row, EQ, -fixed[j])
    return solve(lp).status is LpStatus.OPTIMAL
