"""nangle: an exact-arithmetic engine for n-angulated categories.

Builds finite-dimensional algebras from quivers with relations or
potentials, equips cluster-tilting subcategories of stable module
categories with n-angle structure, verifies the axioms mechanically,
computes the delta-parametrization of pre-n-angulations, and checks
the Calabi-Yau dimension arithmetic on desk-scale examples.
"""

__version__ = "0.1.0"

from .field import Matrix, PrimeField
from .quivers import AlgebraPresentation, PathExpr, Potential, Quiver, parse_presentation
from .algebras import BasedAlgebra, build_based_algebra
from .modules import Module, ModuleMap, hom, is_selfinjective, nakayama
from .stable import StableContext, StableMap
from .functorcat import FunctorCategoryModel, Twist
from .sequences import NSigmaSequence, SequenceMorphism, SigmaCategory, is_exact_sequence
from .heller import Resolutions, ThetaIso, ThetaOracle, delta_of
from .tilting import ClusterTiltingData, StandardOracle, build_angulation, construct_angle

__all__ = [
    "Matrix", "PrimeField", "Quiver", "PathExpr", "Potential", "AlgebraPresentation",
    "parse_presentation", "BasedAlgebra", "build_based_algebra", "Module", "ModuleMap",
    "hom", "is_selfinjective", "nakayama", "StableContext", "StableMap",
    "FunctorCategoryModel", "Twist", "NSigmaSequence", "SequenceMorphism",
    "SigmaCategory", "is_exact_sequence", "Resolutions", "ThetaIso", "ThetaOracle",
    "delta_of", "ClusterTiltingData", "StandardOracle", "build_angulation",
    "construct_angle",
]
