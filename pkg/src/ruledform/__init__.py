"""Ruled hypersurfaces in CP^2 and CH^2 erected over plane curves."""

from .ambient import AmbientConfig, ProjPoint, coincide_residual, horizontal_part, inner
from .curves import CurveFamily, FamilyKind, GeneralCurve
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AmbientConfig", "BACKEND", "CurveFamily", "FamilyKind", "GeneralCurve",
    "ProjPoint", "coincide_residual", "horizontal_part", "inner",
]
