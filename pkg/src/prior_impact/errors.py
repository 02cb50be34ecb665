"""Exception hierarchy shared by every module of the package."""


class PriorImpactError(Exception):
    """Base class for all errors raised by prior_impact."""


class DomainError(PriorImpactError, ValueError):
    """An argument lies outside the domain of a function or distribution."""


class UndefinedMomentError(DomainError):
    """A mean/variance (or anything built on one) does not exist."""


class ConvergenceError(PriorImpactError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    The last estimate and its error estimate are kept so that callers can
    decide whether the partial answer is still usable.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ModelError(PriorImpactError, ValueError):
    """A model case violates one of its construction invariants."""


class OracleInconsistencyError(PriorImpactError):
    """The CDF and quantile forms of the Wasserstein oracle disagree."""


class FitError(PriorImpactError, ValueError):
    """A decay-slope fit cannot be performed on the given rows."""


class SweepError(PriorImpactError):
    """A sweep row failed; carries the offending (model, n, replicate)."""

    def __init__(self, message, model=None, n=None, replicate=None):
        super().__init__(message)
        self.model = model
        self.n = n
        self.replicate = replicate


class SandwichError(SweepError):
    """A sweep row produced lower > oracle or oracle > upper."""
