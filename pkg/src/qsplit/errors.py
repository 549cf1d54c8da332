"""Exception hierarchy shared by all qsplit modules."""


class QsplitError(Exception):
    """Base class for every error raised deliberately by qsplit."""


class InputError(QsplitError):
    """Malformed input file or argument."""


class NonIntegral(QsplitError, ValueError):
    pass


class OrderMismatch(QsplitError, ValueError):
    pass


class ZeroSeries(QsplitError, ValueError):
    pass


class SizeMismatch(QsplitError, ValueError):
    pass


class SingularLeadingTerm(QsplitError, ZeroDivisionError):
    pass


class NonSplitSpectrum(QsplitError):
    """The characteristic polynomial has a non-rational root."""


class PreconditionViolated(QsplitError):
    pass


class GradingViolation(InputError):
    pass


class AssociativityFailure(InputError):
    pass


class UnitFailure(InputError):
    pass


class EmptySlice(QsplitError):
    pass


class WindowTooNarrow(QsplitError):
    pass


class NotACocycle(QsplitError):
    pass


class OddDegree(QsplitError):
    pass


class ConfigurationTooLarge(QsplitError):
    """Tensor power would exceed the documented dense-size caps."""
