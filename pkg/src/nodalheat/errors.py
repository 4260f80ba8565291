"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """An argument violates a documented precondition."""


class EmptyDomainError(ValueError):
    """An operation was asked to work on an empty cell set."""


class UnknownLabelError(KeyError):
    """A nodal-domain label does not exist in the mask."""


class SolverError(RuntimeError):
    """A deterministic solve failed; carries the residual context."""


class ResolutionWarning(UserWarning):
    """Grid spacing too coarse for the requested wavelength or horizon."""
