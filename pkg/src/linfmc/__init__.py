"""Exact rational computations with filtered shifted L∞-algebras.

Submodules: ``gradedlinalg`` (graded linear algebra), ``sullivan_forms``
(polynomial forms on simplices), ``linfty_core`` (algebras, MC elements,
∞-morphisms), ``mc_simplicial`` (MC simplices, horn filling, lifting),
``htt`` (homotopy transfer) and ``cli``.
"""
from .gradedlinalg import ChainComplex, GradedMap, GradedSpace, cohomology, solve_linear
from .htt import CylTriple, classify_piB, connect_solutions, cyl_curvature, transfer
from .linfty_core import (InftyMorphism, LInftyAlgebra, check_linfty, check_morphism, classify_morphism,
                          compose, curv, is_mc, pushforward, quotient, quotient_tower, twist)
from .mc_simplicial import (HornData, Simplex, connect_by_edge, fill_horn_nilpotent, kan_fibration_lift,
                            random_simplex)
from .sullivan_forms import PolyForm

__version__ = "0.1.0"

__all__ = [
    "ChainComplex", "GradedMap", "GradedSpace", "cohomology", "solve_linear",
    "PolyForm",
    "LInftyAlgebra", "InftyMorphism", "check_linfty", "check_morphism", "classify_morphism", "compose",
    "curv", "is_mc", "pushforward", "quotient", "quotient_tower", "twist",
    "Simplex", "HornData", "fill_horn_nilpotent", "kan_fibration_lift", "random_simplex", "connect_by_edge",
    "CylTriple", "transfer", "cyl_curvature", "connect_solutions", "classify_piB",
]
