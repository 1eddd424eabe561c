"""Exception hierarchy shared by all ncqwalk modules."""


class NCQWalkError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(NCQWalkError, ValueError):
    """An argument is outside the domain of the operation."""


class UnsupportedSizeError(NCQWalkError, ValueError):
    """The requested problem size exceeds what the routine supports."""


class DegeneratePointError(NCQWalkError, ArithmeticError):
    """The quasi-energy gap is closed, so the Bloch vector is undefined."""


class ResolutionError(NCQWalkError, RuntimeError):
    """A scan could not separate two events; rerun with a finer scan."""


class DegenerateDistributionError(NCQWalkError, ValueError):
    """A distribution has too few occupied sites for the requested statistic."""


class NoSignalError(NCQWalkError, ValueError):
    """No signal remains in a histogram after windowing and background subtraction."""
