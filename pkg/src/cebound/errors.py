"""Exception hierarchy shared by all cebound modules."""


class CeboundError(Exception):
    """Base class for all errors raised by cebound."""


class ValidationError(CeboundError, ValueError):
    """An input matrix or file failed a structural invariant."""


class DomainError(CeboundError, ValueError):
    """Arguments lie outside the mathematical domain of an operation."""


class PositivityError(DomainError):
    """A matrix required to be (strictly) positive is not."""


class InfeasibleError(DomainError):
    """Parameters violate a feasibility constraint of a construction."""


class NumericError(CeboundError, RuntimeError):
    """An iterative numerical procedure failed to converge."""


class SamplingError(CeboundError, RuntimeError):
    """A rejection sampler exhausted its attempt budget."""
