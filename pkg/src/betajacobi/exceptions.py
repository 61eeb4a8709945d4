"""Exception hierarchy shared by all modules."""


class BetaJacobiError(Exception):
    """Base class for package errors."""


class ParameterError(BetaJacobiError, ValueError):
    """A precondition on user-supplied parameters is violated."""


class ContractError(BetaJacobiError, ValueError):
    """Inputs are individually valid but mutually inconsistent (shape, grid, symmetry)."""


class SingularMatrixError(BetaJacobiError, ArithmeticError):
    """A matrix that must be inverted has a zero pivot."""


class DegenerateScalingError(BetaJacobiError, ArithmeticError):
    """The soft-edge scaling denominator vanishes.

    The offending value is kept on ``denominator``.
    """

    def __init__(self, message, denominator=None):
        super().__init__(message)
        self.denominator = denominator


class NumericalFailure(BetaJacobiError, ArithmeticError):
    """An iterative routine failed to reach its tolerance."""
