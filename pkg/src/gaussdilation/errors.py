"""Exception types shared across the package."""


class ToleranceError(RuntimeError):
    """A numerical decision came out ambiguous or internally inconsistent.

    Raised when two independent routes to the same integer disagree, or when
    a thresholded quantity lands where no clean answer exists (e.g. an odd
    rank for a matrix whose spectrum must come in pairs).
    """


class VerificationError(RuntimeError):
    """A constructed object failed its own certification checks.

    Constructors in this package verify their outputs before returning them;
    this exception means a construction bug or a tolerance breakdown, never
    a property of valid input data.
    """


class InvalidChannelError(ValueError):
    """An operation requiring a completely positive channel got an invalid one."""
