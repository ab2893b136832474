"""Exact Shintani cone geometry over totally real cubic fields."""

from .cones import Cone, CoverBox, Geometry, ShintaniSet
from .embedding import RealEmbeddings, SignConfig, l_point
from .field import FieldElement, FieldSpec

__all__ = [
    "Cone",
    "CoverBox",
    "FieldElement",
    "FieldSpec",
    "Geometry",
    "RealEmbeddings",
    "ShintaniSet",
    "SignConfig",
    "l_point",
]

__version__ = "0.1.0"
