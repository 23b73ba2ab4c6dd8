"""Resilience of conjunctive queries with self-joins."""

from ._resil import *  # noqa: F401,F403
from ._resil import __doc__  # noqa: F401

__version__ = "0.1.0"
