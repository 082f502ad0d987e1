"""Exception types shared across the package."""


class SgevpError(Exception):
    """Base class for all library errors."""


class NonFinite(SgevpError):
    """Input contains NaN or Inf."""


class NotPositiveDefinite(SgevpError):
    def __init__(self, smallest_eigenvalue: float):
        super().__init__(
            "matrix is not positive definite "
            f"(smallest eigenvalue {smallest_eigenvalue:.6g})"
        )
        self.smallest_eigenvalue = smallest_eigenvalue


class ShiftTooClose(SgevpError):
    """Requested shift is too close to the smallest eigenvalue."""


class IndexOutOfRange(SgevpError):
    pass


class DuplicateIndex(SgevpError):
    pass


class DegenerateDenominator(SgevpError):
    """Denominator of a fractional objective is not strictly positive."""


class UnboundedBelow(SgevpError):
    """The fractional problem has no finite attained minimizer."""


class NonPositiveGamma(SgevpError):
    """Denominator positivity certificate gamma is not positive."""


class InvalidK(SgevpError):
    pass


class InsufficientCoordinates(SgevpError):
    """Not enough support/zero coordinates for the requested swap count."""


class ZeroVector(SgevpError):
    pass


class DenominatorCollapse(SgevpError):
    """x'Cx fell below the positivity floor during a solve."""


class TooLarge(SgevpError):
    """Requested exhaustive enumeration exceeds the configured guard."""


class ParseError(SgevpError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class EmptyFile(SgevpError):
    pass


class SingleClass(SgevpError):
    pass


class DegenerateData(SgevpError):
    pass


class DimensionMismatch(SgevpError):
    pass


class RequiresIdentityC(SgevpError):
    pass


class ConfigError(SgevpError):
    """Invalid solver or harness configuration."""
