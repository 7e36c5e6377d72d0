"""Exception hierarchy shared by all modules."""


class AsepError(Exception):
    """Base class for library errors."""


class ParameterError(AsepError, ValueError):
    """Invalid or degenerate model parameters."""


class DenseLimitError(ParameterError):
    """Requested system size exceeds the dense (or sparse) construction limit."""


class ConstraintError(ParameterError):
    """Rates do not satisfy the constraint class required by an operation."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularPointError(AsepError, ArithmeticError):
    """Evaluation at a pole, a zero of a Q-polynomial or a singular matrix."""


class NullSpaceError(AsepError, ArithmeticError):
    """Kernel of the generator is not one-dimensional."""
