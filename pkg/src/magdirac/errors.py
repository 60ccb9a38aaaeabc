"""Exception types shared across the package."""


class InvalidBError(ValueError):
    """Kummer series parameter b is a non-positive integer."""


class ConvergenceError(RuntimeError):
    """A series or adaptive quadrature failed to meet its tolerance."""


class QuadratureError(RuntimeError):
    """Quadrature refinement stalled above the requested tolerance."""


class GridTooCoarseError(RuntimeError):
    """Radial grid cannot resolve the requested mode family."""


class GridResolutionError(ValueError):
    """Grid construction parameters out of range."""


class GridMismatchError(ValueError):
    """Field and basis were built on different grids."""


class TruncationError(ValueError):
    """Requested modes fall outside the available truncation."""


class MultiplierError(ValueError):
    """Spectral multiplier produced non-finite values."""


class ResonantTimeError(ValueError):
    """Closed-form dispersive constant undefined at integer multiples of pi/B0."""


class LeakageError(RuntimeError):
    """Ladder image leaks outside a single target mode; grid under-resolved."""


class UnsupportedCombinationError(ValueError):
    """Norm or estimate requested with an unsupported exponent combination."""


class AdmissibilityError(ValueError):
    """Exponent pair is not Strichartz-admissible."""


class ConfigError(ValueError):
    """Base class for run-configuration problems."""


class ParseError(ConfigError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(ConfigError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
