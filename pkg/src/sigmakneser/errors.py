"""Exception hierarchy.

Every error raised by the package derives from :class:`KneserError`, which is
itself a :class:`ValueError` so callers that only care about "bad input" can
catch the builtin.
"""


class KneserError(ValueError):
    """Base class for all package errors."""


class InvalidFactorError(KneserError):
    pass


class SizeCapExceeded(KneserError):
    pass


class ElementArityError(KneserError):
    pass


class RankError(KneserError, IndexError):
    pass


class GroupMismatchError(KneserError):
    pass


class EnumerationCapExceeded(KneserError):
    pass


class DescentImpossible(KneserError):
    """Raised when a level pair is not nested the way the descent requires."""


class EmptySequenceError(KneserError):
    pass


class EmptySetError(KneserError):
    pass


class DivisibilityError(KneserError):
    pass


class PrimalityError(KneserError):
    pass


class DepthError(KneserError):
    pass


class LevelRangeError(KneserError, IndexError):
    pass


class Exponent2Obstruction(KneserError):
    """No witness x with x in G_{n+1} minus G_n and 2x outside G_n."""


class WindowError(KneserError):
    pass


class HypothesisShapeError(KneserError):
    pass


class SpecError(KneserError):
    """Malformed JSON spec (carries line/column when available)."""
