"""Exception types shared across the package."""


class BellmixError(Exception):
    """Base class for all bellmix errors."""


class NonHermitianInput(BellmixError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class InvalidState(BellmixError):
    """A matrix is too far from a physical density matrix to be rounding error."""


class ZeroTrace(BellmixError):
    """Every eigenvalue was clipped to zero; nothing left to normalize."""


class NotNormalized(BellmixError):
    """Pure-state amplitudes do not have unit norm."""


class OutOfRange(BellmixError):
    """A scalar parameter lies outside its documented range."""


class DegenerateDenominator(BellmixError):
    """Both coincidence rates vanish; the visibility quotient is undefined."""


class IndexOutOfRange(BellmixError):
    """Setting index does not exist in the projector set."""


class MismatchedData(BellmixError):
    """Count records and projector set disagree."""


class NoCounts(BellmixError):
    """Reconstruction requested with zero total counts."""


class ConfigParse(BellmixError):
    """A configuration file could not be parsed."""


class InvalidConfig(BellmixError):
    """A configuration file parsed but contains invalid fields."""


class DataParse(BellmixError):
    """A data file (counts, state, projectors, results) could not be parsed."""
