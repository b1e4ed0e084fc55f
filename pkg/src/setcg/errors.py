"""Exception types raised by the solver components."""


class SetCGError(Exception):
    """Base class for all solver errors."""


class DegenerateGenerator(SetCGError):
    """A dual generator has a non-positive inner product with ``e``."""


class NonFiniteValue(SetCGError, ValueError):
    """An objective or Jacobian evaluation produced NaN or Inf."""


class PartitionTooLarge(SetCGError):
    """The partition set exceeds the enumeration cap."""


class SubproblemNotConverged(SetCGError):
    """The direction subproblem ran out of iterations."""


class LineSearchFailed(SetCGError):
    """No Wolfe step was found within the evaluation budget."""


class DenominatorTooSmall(SetCGError, ZeroDivisionError):
    """A conjugate gradient parameter has a vanishing denominator."""


class UnknownProblem(SetCGError, KeyError):
    """The requested benchmark problem is not registered."""
