"""Exponential sum approximations of t^-beta."""

from ._core import *  # noqa: F401,F403
from ._core import PowexpError, __doc__  # noqa: F401
