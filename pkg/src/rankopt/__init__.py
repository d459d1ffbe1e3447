"""Exact minimization of rank-based regression objectives.

Two solvers share the same exact-rational core:

* :func:`minimize_gen` enumerates the cells of the residual-order hyperplane
  arrangement and minimizes a cell-wise linear objective on each;
* :func:`minimize_ccc` minimizes the convex objective
  ``F(beta) = sum_k alpha_k r_(k)(beta)`` (nondecreasing scores) with a YES/NO
  ellipsoid oracle, bisection and Diophantine rounding.
"""
from .arrangement import build_hyperplanes, enumerate_cells, zeta
from .ccc_solver import CccSolution, minimize_ccc, verify_optimality
from .errors import (
    DegenerateDirection,
    DimensionMismatch,
    DuplicateRow,
    InconsistentSystem,
    InternalInvariant,
    OracleImpure,
    PermutationLimitExceeded,
    PrecisionExhausted,
    RankOptError,
    SnapFailed,
)
from .exact_numeric import compute_bounds, diophantine_approx
from .gen_solver import GenSolution, minimize_gen, minimize_gen_bruteforce
from .model import Dataset, ScoreVector, eval_F, score_coefficients, score_oracle, validate
from .reference import brute_cells, brute_min

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "ScoreVector",
    "validate",
    "score_coefficients",
    "score_oracle",
    "eval_F",
    "build_hyperplanes",
    "enumerate_cells",
    "zeta",
    "compute_bounds",
    "diophantine_approx",
    "minimize_gen",
    "minimize_gen_bruteforce",
    "GenSolution",
    "minimize_ccc",
    "verify_optimality",
    "CccSolution",
    "brute_cells",
    "brute_min",
    "RankOptError",
    "DimensionMismatch",
    "DuplicateRow",
    "PermutationLimitExceeded",
    "InconsistentSystem",
    "OracleImpure",
    "PrecisionExhausted",
    "DegenerateDirection",
    "InternalInvariant",
    "SnapFailed",
]
