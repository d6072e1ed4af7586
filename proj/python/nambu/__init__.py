"""Nambu and Lie-Poisson dynamics, Clebsch fluids and Madelung spinors."""

from ._nambu import *  # noqa: F401,F403
from ._nambu import __doc__  # noqa: F401

__version__ = "0.1.0"
