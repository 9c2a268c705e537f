"""Exception types shared across the package."""


class DuonetError(Exception):
    """Base class for all package errors."""


class ShapeError(DuonetError, ValueError):
    """Operands have incompatible shapes or sizes."""


class NonRealError(DuonetError, ValueError):
    """A complex value could not be projected to a real one within tolerance."""


class ConfigError(DuonetError, ValueError):
    """A model or training configuration is invalid."""


class DataFormatError(DuonetError, ValueError):
    """A data file (CSV, sidecar) is malformed."""


class CheckpointError(DuonetError, ValueError):
    """A checkpoint file is malformed, truncated, or of an unknown version."""


class DegenerateTargetError(DuonetError, ValueError):
    """Target signal has zero variance; NRMSE is undefined."""


class NumericError(DuonetError, RuntimeError):
    """A numeric invariant failed at runtime (non-finite loss or update)."""
