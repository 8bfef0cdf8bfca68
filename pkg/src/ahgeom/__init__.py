"""Curvature of left-invariant almost-Hermitian structures on Lie algebras."""

from .algebra import EPS_ABS, EPS_REL, LieAlgebra, exterior_derivative, validate_algebra, wedge
from .almost_abelian import (
    AlmostAbelianData,
    ClassLabel,
    SolutionFamily,
    classify_jordan,
    realize,
    solve_bismut_unimodular_dim4,
    solve_second_chern_parallel_lee_dim4,
)
from .connections import chern_connection, levi_civita, weyl_connection
from .curvatures import CurvatureReport, curvature_report, gauduchon_ricci
from .errors import ConventionError, StructuralError, ValidationError
from .presets import catalog, get_preset
from .structure import AlmostHermitianStructure, build_structure
from .verifier import condition_flags, einstein_residuals, run_identity_suite

__version__ = "0.1.0"

__all__ = [
    "EPS_ABS", "EPS_REL", "LieAlgebra", "exterior_derivative", "validate_algebra", "wedge",
    "AlmostAbelianData", "ClassLabel", "SolutionFamily", "classify_jordan", "realize",
    "solve_bismut_unimodular_dim4", "solve_second_chern_parallel_lee_dim4",
    "chern_connection", "levi_civita", "weyl_connection",
    "CurvatureReport", "curvature_report", "gauduchon_ricci",
    "ConventionError", "StructuralError", "ValidationError",
    "catalog", "get_preset", "AlmostHermitianStructure", "build_structure",
    "condition_flags", "einstein_residuals", "run_identity_suite",
]
