"""Exception hierarchy.

Two families: :class:`InputError` for malformed or out-of-contract inputs,
:class:`NumericalError` for failures of the numerics themselves.  The CLI maps
them to exit codes 1 and 2.
"""


class ToeplitzLabError(Exception):
    pass


class InputError(ToeplitzLabError, ValueError):
    pass


class NumericalError(ToeplitzLabError, ArithmeticError):
    pass


class PoleAtEvaluationPoint(NumericalError):
    pass


class RootFindingFailure(NumericalError):
    pass


class PoleOnCircle(InputError):
    """A pole lies inside the rejection band around the unit circle."""


class NotAnalytic(InputError):
    pass


class DegreeZero(InputError):
    pass


class WitnessNotNeeded(InputError):
    pass


class WitnessRejected(InputError):
    pass


class NotReducible(InputError):
    pass


class GuardTooSmall(InputError):
    pass


class ToleranceBelowTailBound(NumericalError):
    pass


class AlphaOutOfRange(InputError):
    pass


class InsufficientMoments(InputError):
    pass


class SchemaViolation(InputError):
    pass


class UnknownSubcommand(InputError):
    pass
