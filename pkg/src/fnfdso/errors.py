"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class ZeroInverse(ZeroDivisionError):
    """Multiplicative inverse of zero was requested."""


class SeriesNotInvertible(ValueError):
    """Power series has zero constant term, so no inverse exists."""


class GenericityFailure(RuntimeError):
    """Random vectors failed to certify genericity within the retry budget."""


class DuplicatePosition(ValueError):
    """An element-update batch names the same matrix position twice."""


class GraphError(ValueError):
    """Base class for digraph manipulation errors."""


class EdgeAlreadyPresent(GraphError):
    """Attempt to insert an edge that already exists."""


class EdgeAbsent(GraphError):
    """Attempt to delete or fail an edge that does not exist."""


class WeightOutOfRange(GraphError):
    """Edge weight outside the declared bound."""


class ScriptError(ValueError):
    """Malformed command script; carries a 1-based line number."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
