"""Climate indexes, crop-yield models and weather-derivative pricing."""
__version__ = "0.1.0"

from ._accel import BACKEND  # noqa: E402
from .errors import (ClimRiskError, ConfigError, DataError, DegenerateError, DetrendError,  # noqa: E402
                     InfeasibleFamilyError)

__all__ = ["__version__", "BACKEND", "ClimRiskError", "ConfigError", "DataError", "DegenerateError",
           "DetrendError", "InfeasibleFamilyError"]
