"""Indoor 2.4 GHz path loss modeling, calibration, and coverage prediction."""

__version__ = "0.1.0"

from .errors import PathLossError

__all__ = ["PathLossError", "__version__"]
