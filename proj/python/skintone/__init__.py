"""Python bindings for the skintone evaluation core."""

from ._skintone import *  # noqa: F401,F403
from ._skintone import __version__  # noqa: F401
