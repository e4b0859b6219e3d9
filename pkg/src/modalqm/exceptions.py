"""Exception hierarchy.

Every error is a ``ValueError`` subclass so callers that only care about
"bad input" can catch one thing.
"""


class ModalQMError(ValueError):
    pass


class NotSquare(ModalQMError):
    pass


class NotHermitian(ModalQMError):
    pass


class DimensionMismatch(ModalQMError):
    pass


class RankDeficient(ModalQMError):
    pass


class NonFinite(ModalQMError):
    pass


class DegenerateSpectrum(ModalQMError):
    """The observable does not single out a basis on its own."""


class DegenerateJointSpectrum(DegenerateSpectrum):
    pass


class NotCommuting(ModalQMError):
    pass


class EmptyInput(ModalQMError):
    pass


class UnknownContext(ModalQMError, KeyError):
    pass


class IndexOutOfRange(ModalQMError, IndexError):
    pass


class LengthMismatch(ModalQMError):
    pass


class BadDimension(ModalQMError):
    pass


class NotUnitary(ModalQMError):
    pass


class InvalidTarget(ModalQMError):
    pass


class InvalidDistribution(ModalQMError):
    pass


class NotHalfInteger(ModalQMError):
    pass


class TooLarge(ModalQMError):
    pass


class BadAxis(ModalQMError):
    pass
