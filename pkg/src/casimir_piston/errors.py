"""Exception hierarchy shared by all modules."""

__all__ = ["CasimirError", "PhysicsError", "InadmissibleConfig", "ZeroCrossing", "ZeroModeError",
           "DegenerateWall", "OutOfStrip", "MissingZetaData", "ConvergenceFailure",
           "ToleranceNotMet", "ParseError", "OrderingError", "ConfigError"]


class CasimirError(Exception):
    """Base class for every error raised by the package."""


class PhysicsError(CasimirError):
    """Configuration is valid input but physically inadmissible."""


class InadmissibleConfig(PhysicsError):
    """The wall supports bound states (negative modes)."""


class ZeroCrossing(PhysicsError):
    """h(iz) changes sign on z > 0, i.e. an imaginary-axis zero exists."""

    def __init__(self, msg, z_lo=None, z_hi=None):
        super().__init__(msg)
        self.z_lo = z_lo
        self.z_hi = z_hi


class ZeroModeError(PhysicsError):
    """The small-k coefficient vanishes (longitudinal zero mode)."""


class DegenerateWall(PhysicsError):
    """D(k) vanishes at the requested wavenumber."""


class OutOfStrip(CasimirError):
    """Spectral parameter outside the region where a representation holds."""


class MissingZetaData(CasimirError):
    """A required entry of the transverse zeta data is absent."""

    def __init__(self, index):
        super().__init__(f"missing transverse zeta data for index i={index}")
        self.index = index


class ConvergenceFailure(CasimirError):
    """An iterative numerical method did not converge."""


class ToleranceNotMet(CasimirError):
    """Requested accuracy could not be reached; carries the best result."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class ParseError(CasimirError):
    """Malformed input file; ``lineno`` is 1-based."""

    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = f"line {lineno}: {msg}"
        super().__init__(msg)
        self.lineno = lineno


class OrderingError(ParseError):
    """Spectrum rows are not sorted by nondecreasing lambda."""


class ConfigError(CasimirError):
    """Invalid or incomplete configuration; ``key`` names the offending entry."""

    def __init__(self, msg, key=None):
        super().__init__(f"{key}: {msg}" if key else msg)
        self.key = key
