"""Verification and construction toolkit for combinatorial non-positive
curvature on finite 2-complexes."""

__version__ = "0.1.0"

from .complex_core import Complex, Presentation, Subcomplex  # noqa: F401
from .report import CheckReport  # noqa: F401
