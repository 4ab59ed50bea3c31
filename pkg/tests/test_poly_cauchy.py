import json
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from numpy.testing import assert_allclose

from cornerscatter.errors import CertificationError, DomainError
from cornerscatter.geometry import ConeGeometry, SectorGeometry
from cornerscatter.poly_cauchy import (HomogeneousPolynomial, SolidHarmonicSum, assemble_system,
                                       bilaplacian, cauchy_nullspace, is_resonant_2d, laplacian,
                                       nullspace_report, polynomial_in_span,
                                       solid_harmonic_polynomial, special_solution_2d,
                                       special_solution_cone, verify_special_solution,
                                       wedge_nullspace_2d_family, zeta)
from cornerscatter.poly_cauchy import linalg
from cornerscatter.poly_cauchy.special import cone_log_coefficient

H = HomogeneousPolynomial
X1, X2 = H.variable(2, 0), H.variable(2, 1)
Y1, Y2, Y3 = H.variable(3, 0), H.variable(3, 1), H.variable(3, 2)
PI = math.pi


def sector(frac):
    return SectorGeometry.from_pi_fraction(Fraction(frac))


# -------------------------------------------------------------- operators

def test_laplacian_examples():
    assert laplacian(X1 * X1 + X2 * X2) == H.constant(2, 4)
    assert laplacian(X1 * X1 - X2 * X2).is_zero()
    assert laplacian(Y3 ** 3) == Y3 * 6


def test_bilaplacian_of_biharmonic():
    r2 = H.norm_squared(2)
    assert bilaplacian(r2 * (X1 * X1 - X2 * X2)).is_zero()
    assert bilaplacian(r2 * r2) == H.constant(2, 64)


def test_polynomial_arithmetic_and_json():
    p = (X1 + X2 * Fraction(1, 3)) ** 3
    assert p.degree == 3
    assert p.coefficient((1, 2)) == Fraction(1, 3)
    back = H.from_json(json.loads(json.dumps(p.to_json())))
    assert back == p
    with pytest.raises(Exception):
        X1 + Y1


def test_symbolic_coefficients_are_exact():
    root3 = sp.sqrt(3)
    p = X1 * root3 - X1 * root3
    assert p.is_zero()
    q = (X1 * (root3 + 1)) * (X1 * (root3 - 1))
    assert q == X1 * X1 * 2


# ------------------------------------------------------------- null spaces

def test_half_plane_control():
    basis = cauchy_nullspace(sector(1), 2)
    assert len(basis) == 1
    assert polynomial_in_span(basis, X2 * X2)
    assert not polynomial_in_span(basis, X1 * X2)


@pytest.mark.parametrize("degree", [2, 3, 4, 5, 6])
def test_right_angle_sector_is_trivial(degree):
    assert cauchy_nullspace(sector("1/2"), degree) == []


@pytest.mark.parametrize("omega", [0.7, 1.9, 4.0, 5.5])
def test_irrational_angles_certified_by_intervals(omega):
    report = nullspace_report(SectorGeometry(omega), 7)
    assert report.dimension == 0 and report.method == "interval" and report.certified
    assert report.max_interval_width < 1e-40


@pytest.mark.parametrize("degree", [2, 4, 5])
def test_half_space_cone_control(degree):
    basis = cauchy_nullspace(ConeGeometry.from_pi_fraction("1/2"), degree)
    assert basis
    if degree == 2:
        assert polynomial_in_span(basis, Y3 * Y3)


@pytest.mark.parametrize("frac", ["1/4", "1/3", "2/3"])
def test_cone_trivial(frac):
    for degree in (2, 3, 4):
        assert cauchy_nullspace(ConeGeometry.from_pi_fraction(frac), degree) == []


@pytest.mark.parametrize("geom,degree", [(sector("1/3"), 6), (sector("3/2"), 5),
                                          (sector(1), 4), (ConeGeometry.from_pi_fraction("1/3"), 4),
                                          (ConeGeometry.from_pi_fraction("1/2"), 3),
                                          (ConeGeometry.from_pi_fraction("1/2"), 6),
                                          (ConeGeometry.from_pi_fraction("3/4"), 5)])
def test_exact_and_float_ranks_agree(geom, degree):
    report = nullspace_report(geom, degree, method="exact")
    assert report.exact_rank == report.float_rank


def test_float_method_matches_exact_dimension():
    assert nullspace_report(sector(1), 3, method="float").dimension == \
        nullspace_report(sector(1), 3, method="exact").dimension


def test_low_precision_is_inconclusive():
    with pytest.raises(CertificationError):
        nullspace_report(sector("1/3"), 6, precision_bits=8, allow_exact=False)
    # with the exact fallback the same request still resolves
    assert nullspace_report(sector("1/3"), 6, precision_bits=8).method == "exact"


def test_float_angle_without_fallback():
    with pytest.raises(CertificationError):
        nullspace_report(SectorGeometry(1.0), 8, precision_bits=8)


def test_report_json():
    doc = nullspace_report(sector(1), 2).to_json()
    assert doc["dimension"] == 1 and doc["geometry"] == "sector"
    assert doc["basis"][0]["degree"] == 2
    json.dumps(doc)


def test_system_row_labels():
    system = assemble_system(sector("1/2"), 5, "exact")
    assert system.labels.count("bilap") == 2
    assert {"trace:ray1", "normal:ray1", "trace:ray2", "normal:ray2"} <= set(system.labels)


def test_solid_harmonic_polynomials_are_harmonic():
    for n in range(6):
        for m in range(-n, n + 1):
            p = solid_harmonic_polynomial(n, m)
            assert p.degree == n and laplacian(p).is_zero()


def test_interval_rank_detects_singular_matrix():
    import mpmath
    iv = mpmath.iv
    rows = [[iv.mpf(1), iv.mpf(2)], [iv.mpf(2), iv.mpf(4)]]
    assert not linalg.interval_full_rank(rows, 64).certified
    assert linalg.interval_full_rank([[iv.mpf(1), iv.mpf(0)], [iv.mpf(0), iv.mpf(3)]],
                                     64).certified


# ------------------------------------------------------------ wedge family

def test_wedge_no_solution_for_nonzero_harmonic():
    assert wedge_nullspace_2d_family(sector("1/3"), 4, X1 * X1 - X2 * X2).is_empty


def test_wedge_zero_rhs_gives_only_zero():
    sol = wedge_nullspace_2d_family(sector("1/3"), 4, H.zero(2, 2))
    assert not sol.is_empty and sol.particular.is_zero() and sol.directions == []


def test_wedge_half_plane_control():
    # Lap(x2^2) = 2 is the harmonic right-hand side realized on the half plane
    sol = wedge_nullspace_2d_family(sector(1), 2, H.constant(2, 2))
    assert sol.contains(X2 * X2)
    assert wedge_nullspace_2d_family(sector("1/3"), 2, H.constant(2, 2)).is_empty
    assert not wedge_nullspace_2d_family(sector(1), 2, H.zero(2, 0)).contains(X2 * X2)


def test_wedge_float_angle():
    assert wedge_nullspace_2d_family(SectorGeometry(2.5), 6,
                                     X1 ** 4 - X1 * X1 * X2 * X2 * 6 + X2 ** 4).is_empty


def test_wedge_rejects_non_harmonic_rhs():
    with pytest.raises(DomainError):
        wedge_nullspace_2d_family(sector("1/3"), 4, X1 * X1)


# -------------------------------------------------------- 2D special solutions

def test_constant_rhs_on_two_thirds_pi():
    geom = sector("2/3")
    sol = special_solution_2d(H.constant(2, 1), geom, "dirichlet")
    assert not sol.resonant and sol.log_terms == []
    # q = a x1^2 + b x1 x2 + c x2^2: 2a + 2c = 1, a = 0 on theta = 0,
    # b cos w sin w + c sin^2 w = 0 on theta = w
    assert sol.polynomial_part == X1 * X2 * (sp.sqrt(3) / 2) + X2 * X2 * Fraction(1, 2)
    report = verify_special_solution(sol, H.constant(2, 1), geom, "dirichlet")
    assert report.exact_pde is True
    assert report.pde_residual <= 1e-9 and report.boundary_residual <= 1e-12


def test_right_angle_constant_rhs_is_resonant():
    geom = sector("1/2")
    assert is_resonant_2d(0, geom)
    sol = special_solution_2d(H.constant(2, 1), geom, "dirichlet")
    assert sol.resonant and len(sol.log_terms) == 1
    # sampled check of Lap(q + C r^2 (ln r sin 2t + t cos 2t)) = 1 and the traces
    report = verify_special_solution(sol, H.constant(2, 1), geom, "dirichlet")
    assert report.pde_residual <= 1e-9 and report.boundary_residual <= 1e-12


def test_resonant_log_coefficient_by_hand():
    # q = c x2^2 on the right-angle sector; trace on theta = pi/2 is
    # c r^2 + C r^2 (pi/2)(-1), the harmonic x1 x2 is pinned to zero
    sol = special_solution_2d(H.constant(2, 1), sector("1/2"), "dirichlet")
    (term,) = sol.log_terms
    q = sol.polynomial_part
    c = complex(q.coefficient((0, 2)))
    assert_allclose(complex(term.coefficient), c / (PI / 2), rtol=1e-14)
    assert complex(q.coefficient((1, 1))) == 0


def test_zero_rhs_gives_zero_solution():
    sol = special_solution_2d(H.zero(2, 0), sector("2/3"), "neumann")
    assert sol.polynomial_part.is_zero() and not sol.resonant
    res = special_solution_2d(H.zero(2, 0), sector("1/2"), "dirichlet")
    assert res.polynomial_part.is_zero()
    assert all(complex(t.coefficient) == 0 for t in res.log_terms)


@pytest.mark.parametrize("frac,bc", [("2/3", "neumann"), ("5/4", "dirichlet"),
                                     ("3/2", "neumann"), ("1/3", "dirichlet")])
def test_exact_special_solutions(frac, bc):
    geom = sector(frac)
    for kappa in range(4):
        p = (X1 + X2 * 2) ** kappa if kappa else H.constant(2, 3)
        sol = special_solution_2d(p, geom, bc)
        assert sol.resonant == is_resonant_2d(kappa, geom)
        report = verify_special_solution(sol, p, geom, bc)
        if not sol.resonant:
            assert report.exact_pde is True
        assert report.pde_residual <= 1e-8 * max(1.0, float(sum(abs(complex(c)) for c in p.terms.values())))
        assert report.boundary_residual <= 1e-10


def test_float_angle_special_solution():
    geom = SectorGeometry(1.234)
    p = X1 * X2 * 3 - X2 * X2
    sol = special_solution_2d(p, geom, "dirichlet")
    assert not sol.exact and not sol.resonant
    report = verify_special_solution(sol, p, geom, "dirichlet")
    assert report.pde_residual <= 1e-9 and report.boundary_residual <= 1e-12


def test_injected_fault_is_detected():
    geom = sector("2/3")
    p = H.constant(2, 1)
    sol = special_solution_2d(p, geom, "dirichlet")
    sol.polynomial_part = sol.polynomial_part + X1 * X2 * Fraction(1, 1000)
    report = verify_special_solution(sol, p, geom, "dirichlet")
    assert report.boundary_residual > 1e-4
    sol.polynomial_part = sol.polynomial_part + X1 * X1 * Fraction(1, 1000)
    report = verify_special_solution(sol, p, geom, "dirichlet")
    assert report.exact_pde is False and report.pde_residual > 1e-4


def test_resonance_criterion():
    assert is_resonant_2d(1, sector("1/3"))
    assert not is_resonant_2d(0, sector("2/3"))
    assert is_resonant_2d(0, sector("3/2"))
    assert is_resonant_2d(2, SectorGeometry(PI / 4))
    assert not is_resonant_2d(2, SectorGeometry(1.0))


# ------------------------------------------------------- cone special solutions

def test_zeta_values():
    assert zeta(0, 0) == Fraction(1, 6)
    assert zeta(3, 2) == Fraction(1, 24)
    for kappa in range(8):
        for n in range(kappa + 1):
            assert 1 / zeta(kappa, n) == (kappa + 2) * (kappa + 3) - n * (n + 1)


def test_cone_constant_rhs():
    geom = ConeGeometry(1.1)
    p = SolidHarmonicSum(0, {(0, 0): 1.0})
    sol = special_solution_cone(p, geom, "dirichlet")
    assert not sol.resonant and sol.zeta == {0: Fraction(1, 6)}
    report = verify_special_solution(sol, p, geom, "dirichlet")
    assert report.pde_residual <= 1e-9 and report.boundary_residual <= 1e-9


def test_cone_zero_rhs():
    sol = special_solution_cone(SolidHarmonicSum(1, {}), ConeGeometry(0.8), "neumann")
    assert sol.polynomial_part.is_zero() and not sol.resonant


@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
def test_cone_higher_degree(bc):
    geom = ConeGeometry(2.1)
    p = SolidHarmonicSum.from_polynomial(Y1 * Y3 * 2 + Y2 * Y2 - Y3 * Y3 * 0.5)
    sol = special_solution_cone(p, geom, bc)
    assert not sol.resonant
    report = verify_special_solution(sol, p, geom, bc)
    assert report.pde_residual <= 1e-9 and report.boundary_residual <= 1e-9


def test_solid_harmonic_round_trip():
    poly = Y1 * Y1 * 3 - Y2 * Y3 + Y3 * Y3
    p = SolidHarmonicSum.from_polynomial(poly)
    back = p.to_polynomial()
    pts = np.random.default_rng(0).normal(size=(10, 3))
    assert_allclose(np.asarray(back.evaluate(*pts.T), dtype=complex),
                    np.asarray(poly.to_float().evaluate(*pts.T), dtype=complex), atol=1e-13)


def test_resonant_cone_log_coefficient():
    # P_2(cos w) = 0 at cos w = 1/sqrt(3): kappa = 0 resonates for m = 0
    geom = ConeGeometry(math.acos(1 / math.sqrt(3)))
    sol = special_solution_cone(SolidHarmonicSum(0, {(0, 0): 1.0}), geom, "dirichlet")
    assert sol.resonant and sol.corrector_omitted
    (term,) = sol.log_terms
    # closed-form cap integrals of P_2 and P_2^2 over [1/sqrt(3), 1]
    t = sp.Symbol("t")
    p2 = (3 * t ** 2 - 1) / 2
    lo = 1 / sp.sqrt(3)
    i1 = sp.integrate(p2, (t, lo, 1))
    i2 = sp.integrate(p2 ** 2, (t, lo, 1))
    exact = float(sp.sqrt(5) * i1 / (25 * i2))
    assert_allclose(term.coefficient.real, exact, rtol=1e-12)
    c64 = cone_log_coefficient(0, 0, 0, geom, 64)
    c256 = cone_log_coefficient(0, 0, 0, geom, 256)
    assert_allclose(c64, c256, rtol=1e-13)


def test_solid_harmonic_sum_validation():
    with pytest.raises(DomainError):
        SolidHarmonicSum(2, {(1, 0): 1.0})
    with pytest.raises(DomainError):
        SolidHarmonicSum(2, {(2, 3): 1.0})
