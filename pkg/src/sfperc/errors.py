"""Exception hierarchy shared by all modules."""


class SfpercError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SfpercError, ValueError):
    """A model parameter lies outside its admissible range."""


class DegenerateInputError(SfpercError, ValueError):
    """Input carries no information (e.g. an all-zero degree sequence)."""


class ParityError(SfpercError, ValueError):
    """Total number of half-edges is odd, so no perfect matching exists."""


class SupercriticalRangeError(SfpercError, ValueError):
    """Requested percolation probability exceeds one."""


class CouplingRegimeError(SfpercError, ValueError):
    """The sandwich coupling slack is not small (epsilon >= 1)."""


class TruncationError(SfpercError, ValueError):
    """Truncated jump sequence leaves too much squared mass in the tail."""


class IncompleteTraceError(SfpercError, ValueError):
    """An exploration trace did not kill every half-edge."""


class NumericalError(SfpercError, ArithmeticError):
    """A quadrature or root-finding routine failed to converge."""
