"""Structural distribution function estimation for large multinomials."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    EncodingError,
    IoError,
    NumericError,
)

__version__ = "0.1.0"
