"""Exact combinatorics, deformation checks and tropical sampling for dual pairs of reflexive polytopes."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .polytope import LatticePolytope, codim_ge2_points, is_reflexive, lattice_points, polar_dual
from .fan import Fan, dual_fan, face_fan, induced_fan, mpcp_check, mpcs_check
from .mirror import analyze, connectedness_condition, forbidden_characteristics, obstruction_kernel

__all__ = [
    "BACKEND",
    "Fan",
    "LatticePolytope",
    "analyze",
    "codim_ge2_points",
    "connectedness_condition",
    "dual_fan",
    "face_fan",
    "forbidden_characteristics",
    "induced_fan",
    "is_reflexive",
    "lattice_points",
    "mpcp_check",
    "mpcs_check",
    "obstruction_kernel",
    "polar_dual",
]
