class SiegelThetaError(Exception):
    """Base class for all errors raised by this package."""

    code = "Error"


class DimensionOdd(SiegelThetaError, ValueError):
    code = "DimensionOdd"


class DimensionMismatch(SiegelThetaError, ValueError):
    code = "DimensionMismatch"


class DimensionTooLarge(SiegelThetaError, ValueError):
    code = "DimensionTooLarge"


class UnsupportedDimension(SiegelThetaError, ValueError):
    code = "UnsupportedDimension"


class NotPositiveDefinite(SiegelThetaError, ValueError):
    code = "NotPositiveDefinite"


class NonIntegerEntries(SiegelThetaError, ValueError):
    code = "NonIntegerEntries"


class NotInGD(SiegelThetaError, ValueError):
    code = "NotInGD"


class NumericalSingularity(SiegelThetaError, ArithmeticError):
    code = "NumericalSingularity"


class MaxIterationsExceeded(SiegelThetaError, RuntimeError):
    code = "MaxIterationsExceeded"


class TruncationRadiusOverflow(SiegelThetaError, RuntimeError):
    code = "TruncationRadiusOverflow"


class InfeasibleParameters(SiegelThetaError, ValueError):
    code = "InfeasibleParameters"


class DenominatorNearZero(SiegelThetaError, ArithmeticError):
    code = "DenominatorNearZero"


class CommonZeroSuspected(SiegelThetaError, ArithmeticError):
    code = "CommonZeroSuspected"


class PivotMismatch(SiegelThetaError, ArithmeticError):
    code = "PivotMismatch"


# errors that signal an internal cap rather than bad input (CLI exit code 3)
CAP_ERRORS = (MaxIterationsExceeded, TruncationRadiusOverflow)
