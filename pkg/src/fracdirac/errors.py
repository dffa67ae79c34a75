"""Exception hierarchy shared by all modules."""


class FracDiracError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(FracDiracError, ValueError):
    """Input outside the documented range (sizes, indices, orders)."""


class PoleError(ParameterError):
    """A Gamma/digamma/hypergeometric argument sits on a pole.

    ``argument`` holds the offending value and ``where`` a short label,
    e.g. ``"gamma_ratio denominator"`` or ``"mode (k=3, s=-1)"``.
    """

    def __init__(self, message, argument=None, where=None):
        super().__init__(message)
        self.argument = argument
        self.where = where


class DegenerateParameterError(ParameterError):
    """Parameters for which a transformation formula is singular."""


class ConvergenceError(FracDiracError, ArithmeticError):
    """An iterative evaluation did not converge; ``diagnostics`` says how far it got."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IntegrationError(ConvergenceError):
    """The ODE integrator failed or a growing mode contaminated the solution."""


class PrecisionError(ConvergenceError):
    """An extrapolated limit or quadrature failed its self-consistency check."""


class ConditioningError(ConvergenceError):
    """A least-squares fit is underdetermined or numerically ill-posed."""


class DegenerateError(FracDiracError, ArithmeticError):
    """A quantity that must be nonzero (a denominator, a field) vanished."""


class OptimizationError(ConvergenceError):
    """The line search could not find a descent step."""
