"""
Exceptions raised by the operator equation toolkit.

Every error carries the process exit code the command line front end uses
when the error reaches it: 2 for bad input, 3 for a failed mathematical
precondition.
"""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3


class OperatorEquationError(Exception):
    """Base class for all toolkit errors"""
    exit_code = EXIT_PRECONDITION


# Input errors

class MatrixFormatError(OperatorEquationError):
    exit_code = EXIT_INPUT


class DimMismatch(OperatorEquationError):
    exit_code = EXIT_INPUT


class DimTooLarge(OperatorEquationError):
    exit_code = EXIT_INPUT


class NonFinite(OperatorEquationError):
    exit_code = EXIT_INPUT


class InvalidSearchSpec(OperatorEquationError):
    exit_code = EXIT_INPUT


class InvalidParameters(OperatorEquationError):
    exit_code = EXIT_INPUT


# Mathematical precondition failures

class ConvergenceFailure(OperatorEquationError):
    pass


class NegativePowerOfSingular(OperatorEquationError):
    pass


class FractionalPowerOfIndefinite(OperatorEquationError):
    pass


class NotPositiveDefinite(OperatorEquationError):
    pass


class SingularDenominator(OperatorEquationError):
    pass


class NumericallySingular(OperatorEquationError):
    pass


class DegenerateExponent(OperatorEquationError):
    pass


class NonPositiveEigenvalue(OperatorEquationError):
    pass


class BNotPsd(OperatorEquationError):
    pass


class RConditionInvalid(OperatorEquationError):
    pass
