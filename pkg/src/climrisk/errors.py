class ClimRiskError(ValueError):
    """Base class for all package errors."""


class DataError(ClimRiskError):
    """Malformed or incomplete input data."""


class ConfigError(ClimRiskError):
    """Invalid run configuration or region mapping."""


class DegenerateError(ClimRiskError):
    """Input carries no variation where variation is required."""


class InfeasibleFamilyError(ClimRiskError):
    """No candidate distribution family supports the data."""


class DetrendError(ClimRiskError):
    """Linear detrending produced non-positive levels."""
