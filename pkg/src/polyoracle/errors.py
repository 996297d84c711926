"""Exception hierarchy shared by the library and the command line."""


class PolyOracleError(Exception):
    """Base class for all library errors."""


class DimensionError(PolyOracleError, ValueError):
    """Operands disagree on the ambient dimension."""


class DegenerateError(PolyOracleError, ValueError):
    """A zero normal, zero direction or similar degenerate input."""


class ParameterError(PolyOracleError, ValueError):
    """An argument lies outside its admissible range."""


class InfeasibleError(PolyOracleError):
    """The polytope (or linear program) has no feasible point."""


class UnboundedError(PolyOracleError):
    """The polytope (or linear program) is unbounded.

    ``direction`` optionally carries the offending direction, e.g. the
    coordinate index of a bounding-box solve or a sampled chord direction.
    """

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class NumericalError(PolyOracleError):
    """An iterative routine failed to converge within its budget."""


class NotInteriorError(PolyOracleError, ValueError):
    """A point that must be strictly interior is on or outside the boundary."""


class FileFormatError(PolyOracleError, ValueError):
    """A polytope, point or ray file does not follow the text format."""
