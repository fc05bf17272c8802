"""Halpern and hybrid steepest descent iterations for variational
inequalities over common fixed-point sets of nonexpansive mappings.

The heavy lifting lives in the compiled extension; this package re-exports
its surface unchanged.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
