"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A dense computation was requested above its hard size cap."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""


class NotFreeFermionError(ValueError):
    """A free-fermion routine was handed a spec with interaction angles."""


class ModeDetectionError(RuntimeError):
    """No boundary mode was found at the requested frequency."""


class DataQualityError(RuntimeError):
    """Measured data violates a positivity/reality assumption."""
