"""Conformal fractional Dirac operator on flat space and the round sphere."""

from . import clifford, errors, extension, flat, specfun, sphere, yamabe
from .clifford import CliffordRep, build_clifford
from .errors import FracDiracError, ParameterError, PoleError

__version__ = "0.1.0"

__all__ = [
    "clifford", "errors", "extension", "flat", "specfun", "sphere", "yamabe",
    "CliffordRep", "build_clifford", "FracDiracError", "ParameterError", "PoleError",
]
