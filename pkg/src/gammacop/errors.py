"""Exception hierarchy shared by all gammacop modules.

The CLI maps these onto its exit-code taxonomy: usage errors -> 1,
model parsing -> 2, domain/precondition violations -> 3, series or
quadrature convergence failures -> 4, validation failure -> 5.
"""


class GammacopError(Exception):
    """Base class for all library errors."""


class ArgumentError(GammacopError, ValueError):
    """Malformed call: dimension mismatch, out-of-range index, bad flag combination."""


class DomainError(GammacopError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class ExistenceError(DomainError):
    """The requested distribution does not exist for these parameters (e.g. c < 0)."""


class PreconditionError(GammacopError, ValueError):
    """A theorem hypothesis is violated; distinct from a negative test verdict."""


class ModelError(GammacopError, ValueError):
    """A model fails the structural gate required by the requested construction."""


class KernelError(GammacopError):
    """Copula kernel is negative somewhere; the model is surfaced, never clamped."""


class ConstructionError(GammacopError):
    """A derived construction failed its mandatory self-check (sampler mixtures)."""


class ParseError(GammacopError, ValueError):
    """Model JSON could not be parsed; the message names the offending key."""


class ConvergenceError(GammacopError, RuntimeError):
    """A series or quadrature did not converge within its budget.

    Carries the partial result and the estimated remaining error so the
    caller can decide whether the partial value is still usable.
    """

    def __init__(self, message, partial=None, est_error=None):
        super().__init__(message)
        self.partial = partial
        self.est_error = est_error
