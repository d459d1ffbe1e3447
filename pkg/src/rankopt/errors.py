"""Exception types shared across the solvers."""


class RankOptError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(RankOptError, ValueError):
    pass


class DuplicateRow(RankOptError, ValueError):
    """Two rows of (X | y) coincide; ``i`` and ``j`` are 1-based."""

    def __init__(self, i, j):
        self.i = i
        self.j = j
        super().__init__(f"duplicate rows {i} and {j}")


class PermutationLimitExceeded(RankOptError):
    def __init__(self, n, cap):
        self.n = n
        self.cap = cap
        super().__init__(f"n={n} exceeds the permutation cap {cap}")


class InconsistentSystem(RankOptError, ValueError):
    pass


class OracleImpure(RankOptError):
    """A coefficient oracle returned different vectors for one permutation."""


class PrecisionExhausted(RankOptError, ArithmeticError):
    pass


class DegenerateDirection(RankOptError, ArithmeticError):
    pass


class InternalInvariant(RankOptError, AssertionError):
    pass


class SnapFailed(RankOptError):
    """Diophantine recovery of the optimum failed (indicates a bound defect)."""
