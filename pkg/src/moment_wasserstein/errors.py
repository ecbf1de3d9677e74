"""Exception types raised across the package."""


class MomentWassersteinError(Exception):
    """Base class for package errors."""


class DegreeOverflowError(MomentWassersteinError, ValueError):
    """Requested polynomial degree is beyond the configured cap."""


class DegreeError(MomentWassersteinError, ValueError):
    """Degree is not a positive multiple of 4."""


class CenteringError(MomentWassersteinError, ValueError):
    """Target function does not vanish at the origin."""


class InputFunctionError(MomentWassersteinError, ValueError):
    """A user-supplied function returned non-finite values."""


class CertificationError(MomentWassersteinError, RuntimeError):
    """A constructed approximation violates its certified coefficient envelope."""


class InputError(MomentWassersteinError, ValueError):
    """Sample or measure data is malformed (non-finite, empty, bad weights)."""


class NormalizationError(MomentWassersteinError, ValueError):
    """A direction vector is not of unit length."""


class UnsupportedDimensionError(MomentWassersteinError, ValueError):
    """Sphere nets are only available for d in {2, 3}."""


class SizeCapError(MomentWassersteinError, ValueError):
    """Generator size exceeds its cap."""


class BudgetInfeasibleError(MomentWassersteinError, OverflowError):
    """Polynomial degree makes B**m overflow float64."""


class ConfigError(MomentWassersteinError, ValueError):
    """Experiment configuration is invalid."""
