"""Exception types raised across the package."""


class GdiffError(Exception):
    """Base class for all errors raised by gdiff."""


class DomainError(GdiffError, ValueError):
    """An argument lies outside the domain of an operation."""


class DegenerateScore(DomainError):
    """The Gaussian score is undefined because a forward eigenvalue is zero.

    This happens when a scheme evaluates the score at forward time 0 on a
    covariance with a zero eigenvalue (Heun without truncation time).
    """


class IngestError(GdiffError, ValueError):
    """An input file could not be parsed or violates a data invariant."""


class NumericError(GdiffError, ArithmeticError):
    """A numerical routine failed to converge."""
