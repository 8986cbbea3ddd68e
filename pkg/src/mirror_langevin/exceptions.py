"""Exception hierarchy shared by every module of the package."""


class MirrorLangevinError(Exception):
    """Base class for all package errors."""


class DomainError(MirrorLangevinError, ValueError):
    """A point lies on or outside the open domain of a map or potential."""


class ConvergenceError(MirrorLangevinError, ArithmeticError):
    """An iterative solve exhausted its iteration budget."""


class WeightError(MirrorLangevinError, ValueError):
    """Dirichlet / weighted-barrier weights are not strictly positive."""


class AlphaError(MirrorLangevinError, ValueError):
    """Relative convexity constant must be positive for this operation."""


class EmptyError(MirrorLangevinError, ValueError):
    """Not enough samples or iterates for the requested statistic."""


class ShapeError(MirrorLangevinError, ValueError):
    """Array has the wrong shape (e.g. non-square cost matrix)."""


class SizeError(MirrorLangevinError, ValueError):
    """Two empirical measures have different numbers of atoms."""


class BudgetError(MirrorLangevinError, ArithmeticError):
    """A rejection sampler exhausted its proposal budget."""


class ParseError(MirrorLangevinError, ValueError):
    """Malformed configuration file."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(MirrorLangevinError, ValueError):
    """A configuration value violates an invariant."""
