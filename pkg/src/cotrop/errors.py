"""Exception hierarchy.

Two families: :class:`InvalidInput` covers bad arguments and inputs that
violate a documented precondition (the CLI maps these to exit code 2);
:class:`ComputationError` covers well-formed inputs for which the requested
object does not exist (exit code 3).
"""


class CotropError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(CotropError, ValueError):
    pass


class ComputationError(CotropError):
    pass


class ZeroSeries(InvalidInput):
    def __init__(self, message="zero series where a nonzero series is required", index=None):
        if index is not None:
            message = f"{message} (coordinate {index})"
        super().__init__(message)
        self.index = index


class UnsupportedDimension(InvalidInput):
    pass


class OutOfRange(InvalidInput):
    pass


class NotNormalized(InvalidInput):
    pass


class NotMonomial(InvalidInput):
    pass


class NotMaximallySparse(InvalidInput):
    pass


class InvalidEdge(InvalidInput):
    pass


class NotTriangulation(InvalidInput):
    pass


class UnsupportedCell(InvalidInput):
    pass


class IllegalResolution(InvalidInput):
    pass


class SizeMismatch(InvalidInput):
    pass


class TargetMismatch(InvalidInput):
    pass


class SchemaError(InvalidInput):
    """A JSON document does not follow the expected layout."""


class EmptyCurve(ComputationError):
    """The polynomial has a single monomial, so its zero set in the torus is empty."""


class EmptyTruncation(ComputationError):
    pass


class EmptyInput(ComputationError):
    pass
