"""Minimization of general cell-wise linear objectives (one LP per cell).

On each cell ``pi`` the objective is ``sum_i a_i (y_i - x_i . beta)`` with
``a = oracle(pi)``.  Minimizing every piece over its closed cell gives the
minimum of the lower-semicontinuous envelope; an unbounded piece makes the
whole problem unbounded.
"""
from __future__ import annotations

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arrangement import Arrangement, build_hyperplanes, enumerate_cells
from .errors import OracleImpure, PermutationLimitExceeded
from .exact_numeric import as_fraction, bitsize
from .lp_exact import LE, LinearProgram, LpStatus, solve
from .model import CoefficientOracle, Dataset, eval_cell_objective, validate
from .reference import DEFAULT_CAP, brute_cells

__all__ = ["GenSolution", "minimize_gen", "minimize_gen_bruteforce", "closed_cell_lp"]

log = logging.getLogger(__name__)
_ZERO = Fraction(0)


@dataclass
class GenSolution:
    status: str  # "minimum" | "unbounded"
    value: Optional[Fraction] = None
    minimizer: Optional[list] = None
    pi: Optional[tuple] = None
    stats: dict = field(default_factory=dict)


def closed_cell_lp(dataset: Dataset, pi, a) -> LinearProgram:
    """LP maximizing ``(sum_i a_i x_i) . beta`` over the closure of cell ``pi``.

    All adjacent order constraints are kept (redundant duplicates included):
    they are valid on the closed cell and dropping one can only enlarge it.
    """
    p = dataset.p
    grad = [sum((ai * row[j] for ai, row in zip(a, dataset.X) if ai), _ZERO) for j in range(p)]
    lp = LinearProgram(grad)
    for u, v in zip(pi, pi[1:]):
        normal = [b - c for b, c in zip(dataset.X[v], dataset.X[u])]
        if any(normal):
            lp.add(normal, LE, dataset.y[v] - dataset.y[u])
    return lp


class _CheckedOracle:
    def __init__(self, oracle, bit_cap):
        self.oracle = oracle
        self.bit_cap = bit_cap
        self.memo = {}
        self.warned = False

    def __call__(self, pi):
        a = [as_fraction(v) for v in self.oracle(tuple(pi))]
        prev = self.memo.get(pi)
        if prev is not None and prev != a:
            raise OracleImpure(f"oracle returned two coefficient vectors for {pi}")
        self.memo[pi] = a
        if self.bit_cap is not None and not self.warned:
            bits = sum(bitsize(v) for v in a)
            if bits > self.bit_cap:
                log.warning("oracle coefficients use %d bits (cap %d)", bits, self.bit_cap)
                self.warned = True
        return a


def _minimize_over(dataset: Dataset, cells, oracle, stats) -> GenSolution:
    best = None
    for pi in cells:
        a = oracle(pi)
        stats["lps"] += 1
        out = solve(closed_cell_lp(dataset, pi, a))
        if out.status is LpStatus.UNBOUNDED:
            return GenSolution("unbounded", pi=pi, stats=stats)
        val = eval_cell_objective(dataset, a, out.x)
        if best is None or val < best.value:
            best = GenSolution("minimum", val, out.x, pi, stats)
    return best


def minimize_gen(dataset: Dataset, oracle: CoefficientOracle, *, seed: int = 0,
                 coefficient_bit_cap: Optional[int] = None) -> GenSolution:
    """Minimum of the GEN objective by cell enumeration plus one LP per cell.

    Cells are streamed from the enumeration, so memory does not grow with the
    number of cells.  The minimizer is *a* minimizer; ties go to the first
    cell found.
    """
    validate(dataset)
    arr = build_hyperplanes(dataset)
    checked = _CheckedOracle(oracle, coefficient_bit_cap)
    stats = {"cells": 0, "lps": 0}
    state = {"best": None, "unbounded": None}

    def sink(pi, witness):
        stats["cells"] += 1
        if state["unbounded"] is not None:
            return
        res = _minimize_over(dataset, [pi], checked, stats)
        if res.status == "unbounded":
            state["unbounded"] = res
        elif state["best"] is None or res.value < state["best"].value:
            state["best"] = res

    enum_stats = enumerate_cells(arr, sink, seed=seed)
    stats["tightness_lps"] = enum_stats.lps
    stats["max_depth"] = enum_stats.max_depth
    result = state["unbounded"] or state["best"]
    result.stats = stats
    return result


def minimize_gen_bruteforce(dataset: Dataset, oracle: CoefficientOracle,
                            cap: int = DEFAULT_CAP) -> GenSolution:
    """Same answer as :func:`minimize_gen`, looping over all of S_n."""
    validate(dataset)
    if dataset.n > cap:
        raise PermutationLimitExceeded(dataset.n, cap)
    checked = _CheckedOracle(oracle, None)
    cells = sorted(brute_cells(dataset, cap))
    stats = {"cells": len(cells), "lps": 0, "candidates": math.factorial(dataset.n)}
    return _minimize_over(dataset, cells, checked, stats)
