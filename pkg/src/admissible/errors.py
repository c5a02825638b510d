"""Exception types shared across the package."""


class AdmissibleError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(AdmissibleError, ValueError):
    """Vector lengths or arities do not agree."""


class ParseError(AdmissibleError, ValueError):
    """Malformed function text. ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.message = message
        self.offset = offset


class CatalogError(AdmissibleError, KeyError):
    """Unknown catalog entry."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown catalog entry"


class EvaluationError(AdmissibleError, ArithmeticError):
    """Evaluation broke down (e.g. exp of a pole)."""


class PoleError(EvaluationError):
    """A denominator vanished. ``point`` is the offending input, when known."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class GeometryError(AdmissibleError):
    """A geometric construction failed (outside chart, no convergence, ...)."""


class SamplingError(AdmissibleError):
    """Rejection sampling could not produce points at the requested scale."""


class ChainError(GeometryError):
    """A polydisc chain could not be constructed."""


class FitError(AdmissibleError, ValueError):
    """Not enough data to fit a growth exponent."""


class InvariantError(AdmissibleError, AssertionError):
    """An internal cross-check failed."""
