"""Exception hierarchy shared by every pipeline stage.

Each error carries a stable ``code`` string so the CLI and the HTTP
service can map failures to exit codes / status codes without matching
on message text.
"""


class SegError(Exception):
    """Base class for all pipeline errors."""

    code = "ERROR"


class SingularGeometryError(SegError):
    code = "SINGULAR_GEOMETRY"


class UnknownBasisError(SegError):
    code = "UNKNOWN_BASIS"


class BadMagicError(SegError):
    code = "BAD_MAGIC"


class UnsupportedFieldError(SegError):
    code = "UNSUPPORTED_FIELD"


class SizeMismatchError(SegError):
    code = "SIZE_MISMATCH"


class MalformedError(SegError):
    code = "MALFORMED"


class NotPlanarError(SegError):
    code = "NOT_PLANAR"


class OutOfGridError(SegError):
    code = "OUT_OF_GRID"


class SelfIntersectingError(SegError):
    code = "SELF_INTERSECTING"


class EmptySetError(SegError):
    code = "EMPTY_SET"


class GeometryMismatchError(SegError):
    code = "GEOMETRY_MISMATCH"


class EmptyMaskError(SegError):
    code = "EMPTY_MASK"
