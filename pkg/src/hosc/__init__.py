"""Higher-order staircase codes built from difference triangle sets."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
