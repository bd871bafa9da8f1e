"""Point process simulation, spatial statistics and cluster detection."""

from ._core import *  # noqa: F401,F403
from ._core import PointprocError, RngStream, IntensityFn  # noqa: F401

__version__ = "0.1.0"
