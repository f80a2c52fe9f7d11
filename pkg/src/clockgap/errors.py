"""Exception hierarchy shared by all clockgap modules."""


class ClockGapError(Exception):
    pass


class DimensionError(ClockGapError, ValueError):
    """Operator or vector dimension is invalid or inconsistent."""


class ParameterError(ClockGapError, ValueError):
    """A scalar parameter (s, b, k, tolerance, ...) is out of range."""


class ConvergenceError(ClockGapError, RuntimeError):
    """Bisection did not reach the requested width within the iteration cap.

    ``bracket`` holds the best ``(lo, hi)`` interval found for the
    eigenvalue that failed to converge, ``index`` its 0-based position.
    """

    def __init__(self, message, bracket=None, index=None):
        super().__init__(message)
        self.bracket = bracket
        self.index = index
