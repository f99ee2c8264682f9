"""Top-rank pair learning for writer-independent signature verification."""

from ._toprank import *  # noqa: F401,F403
from ._toprank import __doc__  # noqa: F401

__version__ = "0.1.0"
