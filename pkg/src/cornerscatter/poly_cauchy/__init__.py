"""Homogeneous polynomial algebra, Cauchy null spaces and special solutions."""
from .nullspace import (AffineSolution, BoundaryConditionSystem, NullspaceReport, assemble_system,
                        cauchy_nullspace, nullspace_report, polynomial_in_span,
                        solid_harmonic_polynomial, wedge_nullspace_2d_family)
from .polynomial import HomogeneousPolynomial, legendre_coefficients, monomial_exponents
from .special import (LogTerm, ResidualReport, SolidHarmonicSum, SpecialSolution, is_resonant_2d,
                      special_solution_2d, special_solution_cone, verify_special_solution, zeta)


def laplacian(p: HomogeneousPolynomial) -> HomogeneousPolynomial:
    """Exact Laplacian of ``p``."""
    return p.laplacian()


def bilaplacian(p: HomogeneousPolynomial) -> HomogeneousPolynomial:
    """Exact bi-Laplacian of ``p``."""
    return p.bilaplacian()


__all__ = ["AffineSolution", "BoundaryConditionSystem", "HomogeneousPolynomial", "LogTerm",
           "NullspaceReport", "ResidualReport", "SolidHarmonicSum", "SpecialSolution",
           "assemble_system", "bilaplacian", "cauchy_nullspace", "is_resonant_2d", "laplacian",
           "legendre_coefficients", "monomial_exponents", "nullspace_report", "polynomial_in_span",
           "solid_harmonic_polynomial", "special_solution_2d", "special_solution_cone",
           "verify_special_solution", "wedge_nullspace_2d_family", "zeta"]
