"""Exception types shared across the package."""


class NoSlipError(Exception):
    """Base class for all package-specific errors."""


class DomainError(NoSlipError, ValueError):
    """A parameter or state lies outside the mathematical domain of an operation."""


class GrazingEventError(NoSlipError):
    """Collision map applied at (near-)tangential incidence; the flow terminates here."""


class CornerEventError(NoSlipError):
    """Trajectory reached a nonsmooth boundary point; the flow terminates here."""


class FocalPointError(NoSlipError):
    """Tube radius too large for the cross-section curvature: 1 - r*kappa*sin(phi) <= 0."""


class StiffnessError(NoSlipError):
    """Adaptive integrator step size underflowed."""


class ConfigError(NoSlipError, ValueError):
    """Malformed run configuration; message carries the offending key path."""
