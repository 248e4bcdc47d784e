"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalFailure(RuntimeError):
    """A numerical procedure did not converge or produced an unusable result."""


class InsufficientSignalError(NumericalFailure):
    """Too few samples above the noise floor to fit an exponential rate."""
