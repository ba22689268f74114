"""Exception hierarchy.

Usage problems derive from ``ValueError``; failures of the numerics on valid
input derive from :class:`NumericalError` (the CLI maps these to exit code 3).
"""


class DomainError(ValueError):
    """A point lies outside the cube [-1, 1]^d."""


class NumericalError(RuntimeError):
    """Base class for failures on well-formed input."""


class RankDeficiencyError(NumericalError):
    pass


class UndersampledError(NumericalError):
    """Fewer samples than basis functions."""

    def __init__(self, n, M):
        self.n = n
        self.M = M
        super().__init__(f"undersampled design: n={n} < M={M}")


class BudgetExceededError(NumericalError):
    pass


class AsymmetryError(ValueError):
    pass
