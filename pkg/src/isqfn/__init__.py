"""Discrete vector-valued intrinsic square functions, their BMO commutators,
and weighted amalgam norms on uniform grids in one and two dimensions."""
from .grid import Ball, DegenerateRegionWarning, Grid, ScalarField, VectorField, make_grid
from .norms import AmalgamParams, DegenerateNormWarning, amalgam_norm, lp_norm, luxemburg_norm, weak_lp_norm
from .sqfn import ConeParams, commutator_square, intrinsic_square, vec_commutator_square, vec_intrinsic_square
from .testbank import FunctionBank, build_bank
from .weights import Weight, lebesgue, power_weight

__version__ = "0.1.0"

__all__ = [
    "AmalgamParams", "Ball", "ConeParams", "DegenerateNormWarning", "DegenerateRegionWarning", "FunctionBank",
    "Grid", "ScalarField", "VectorField", "Weight", "amalgam_norm", "build_bank", "commutator_square",
    "intrinsic_square", "lebesgue", "lp_norm", "luxemburg_norm", "make_grid", "power_weight",
    "vec_commutator_square", "vec_intrinsic_square", "weak_lp_norm",
]
