"""Exception hierarchy.

Every validation error carries the offending ``residual`` so callers (and the
CLI) can report how far an object is from satisfying the violated invariant.
"""

from __future__ import annotations


class SeqMnsError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class DimensionError(SeqMnsError, ValueError):
    pass


class ShapeError(SeqMnsError, ValueError):
    pass


class HermitianityError(SeqMnsError, ValueError):
    pass


class NotPsdError(SeqMnsError, ValueError):
    pass


class TraceError(SeqMnsError, ValueError):
    pass


class CompletenessError(SeqMnsError, ValueError):
    pass


class UnitarityError(SeqMnsError, ValueError):
    pass


class ConvergenceError(SeqMnsError, RuntimeError):
    pass


class DegenerateError(SeqMnsError, ValueError):
    pass


class ParamCountError(SeqMnsError, ValueError):
    pass


class NonFiniteError(SeqMnsError, ValueError):
    pass
