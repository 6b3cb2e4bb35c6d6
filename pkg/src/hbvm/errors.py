"""Exception hierarchy shared by all hbvm modules."""


class HbvmError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(HbvmError, ValueError):
    pass


class InvalidIndexError(InvalidArgumentError):
    pass


class ParityError(InvalidArgumentError):
    """k - s is odd, so the rule-of-thumb selection is not symmetric."""


class SelectionError(InvalidArgumentError):
    pass


class PartitionRejectedError(HbvmError):
    """The fundamental block of the integral matrix is numerically singular."""


class PoleError(InvalidArgumentError):
    pass


class InvalidSpectrumError(InvalidArgumentError):
    pass


class NumericalError(HbvmError, ArithmeticError):
    """An internal iteration (Newton for nodes, eigenvalues) failed to converge."""


class StepRejectedError(HbvmError):
    pass


class ConvergenceError(HbvmError):
    """The stage iteration hit its cap; ``residual`` holds the last residual norm."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
