"""Exception hierarchy shared by all solver modules."""


class BifrontError(Exception):
    """Base class for every error raised by the package."""


class DomainError(BifrontError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class MalformedModelError(BifrontError, ValueError):
    """A model description cannot be turned into evaluable functions."""


class DegenerateEndpointError(BifrontError):
    """No positive solution of the reduced problem attaches at v = 1."""


class StiffnessError(BifrontError):
    """The explicit integrator could not make progress."""


class InconsistencyError(BifrontError):
    """A solver result contradicts a proven property (usually a tolerance problem)."""


class InvalidTrajectoryError(BifrontError, ValueError):
    """A trajectory is not admissible, or is corrupted, for the requested operation."""


class ConstraintViolationError(BifrontError):
    """A profile violates the gradient bound |v'| < 1."""


class RegimeError(BifrontError):
    """The requested construction is not available for the classified regime."""


class ShootingError(BifrontError):
    """Phase-plane shooting did not connect the two equilibria."""
