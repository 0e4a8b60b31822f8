from .base import (
    BaseProfile,
    ConstantProfile,
    ProductProfile,
    RadialFunction,
    SampledProfile,
    ScaledProfile,
    as_profile,
)
from .builtin import BumpProfile, ConeWarp, GluedWarp, HornWarp, PowerLawFactor
from .symbolic import SymbolicProfile

__all__ = [
    "BaseProfile",
    "BumpProfile",
    "ConeWarp",
    "ConstantProfile",
    "GluedWarp",
    "HornWarp",
    "PowerLawFactor",
    "ProductProfile",
    "RadialFunction",
    "SampledProfile",
    "ScaledProfile",
    "SymbolicProfile",
    "as_profile",
]
