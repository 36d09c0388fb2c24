"""Exception types shared across the package."""


class ChirpClimbError(Exception):
    """Base class for package errors."""


class ConfigError(ChirpClimbError):
    """Bad run configuration (file, override, or missing option)."""


class NumericalGuardError(ChirpClimbError):
    """A numerical-quality guard tripped during a computation."""


class NormDriftError(NumericalGuardError):
    """State norm drifted beyond the configured budget."""


class BasisTruncationError(NumericalGuardError):
    """Population reached the top of the truncated basis."""


class GridCoverageError(NumericalGuardError):
    """Too much phase-space mass lies outside the requested grid."""


class BracketError(ChirpClimbError):
    """Threshold bracketing failed (no capture found or non-monotone bracket)."""
