"""Exception hierarchy."""


class LinsoficError(Exception):
    """Base class for all errors raised by this package."""


class FieldError(LinsoficError):
    """Invalid field descriptor, reducible modulus, or incompatible fields."""


class PolynomialError(LinsoficError):
    """Zero polynomial, unfactorable input, or missing factor hints."""


class ShapeError(LinsoficError):
    """Matrix dimensions or fields do not match."""


class SingularMatrixError(LinsoficError):
    """A matrix that must be invertible is singular."""


class GroupError(LinsoficError):
    """A multiplication table is not a group, or images violate relations."""


class PreconditionError(LinsoficError):
    """An operator's input does not meet its stated hypothesis."""


class DimensionCapError(LinsoficError):
    """A construction would exceed the configured dimension cap."""


class QuotientSearchError(LinsoficError):
    """The separating-quotient search ran out of budget."""

    def __init__(self, message, failing_word=None):
        super().__init__(message)
        self.failing_word = failing_word


class BoundViolation(AssertionError):
    """A bound that the construction guarantees failed on recomputation."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details
