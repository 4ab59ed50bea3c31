import json
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special as sps
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from cornerscatter.errors import DomainError
from cornerscatter.helmholtz_series import (Expansion2D, Expansion3D, degree_term, evaluate,
                                            expand_2d, expand_3d, expansion_from_json,
                                            expansion_to_json, harmonic_decompose,
                                            helmholtz_residual, laplacian_coefficients,
                                            lowest_taylor_terms, plane_wave_seeds_2d,
                                            plane_wave_seeds_3d, residual_decay)
from cornerscatter.poly_cauchy import HomogeneousPolynomial

X1 = HomogeneousPolynomial.variable(2, 0)
X2 = HomogeneousPolynomial.variable(2, 1)
R2 = HomogeneousPolynomial.norm_squared(2)


# ------------------------------------------------------------- recurrences

def test_expand_2d_first_step():
    exp = expand_2d({(0, "+"): 1}, 1.7, 2)
    assert_allclose(exp.coefficients[(0, 1, 1)], -1.7 ** 2 / 4, rtol=1e-15)


def test_expand_2d_hand_iterated():
    exp = expand_2d({(1, "+"): 1}, Fraction(2), 5)
    assert exp.coefficients[(1, 1, 1)] == Fraction(-1, 2)
    assert exp.coefficients[(1, 2, 1)] == Fraction(1, 12)
    assert (1, 3, 1) not in exp.coefficients


def test_expand_2d_zero_and_dropped_seeds():
    exp = expand_2d({(0, "+"): 0, (1, "-"): 0}, 2.0, 6)
    assert all(c == 0 for c in exp.coefficients.values())
    exp = expand_2d({(0, "-"): 5, (9, "+"): 1}, 2.0, 6)
    assert exp.coefficients == {}


def test_expand_2d_recurrence_invariant():
    k = Fraction(7, 3)
    exp = expand_2d({(n, s): Fraction(n + 1, 2 + s) for n in range(5) for s in (1, -1)}, k, 9)
    for (n, m, s), c in exp.coefficients.items():
        nxt = exp.coefficients.get((n, m + 1, s))
        if nxt is not None:
            assert nxt == -k * k / (4 * (m + 1) * (n + m + 1)) * c


def test_expand_3d_examples():
    exp = expand_3d({(0, 0): 1}, Fraction(1), 2)
    assert exp.coefficients[(0, 1, 0)] == Fraction(-1, 6)
    exp = expand_3d({(1, 1): 1}, Fraction(1), 3)
    assert exp.coefficients[(1, 1, 1)] == Fraction(-1, 10)
    assert expand_3d({}, 1.0, 4).coefficients == {}


def test_expand_3d_rejects_bad_index():
    with pytest.raises(DomainError):
        expand_3d({(1, 2): 1}, 1.0, 4)


def test_wavenumber_and_degree_validation():
    with pytest.raises(DomainError):
        expand_2d({}, 0.0, 3)
    with pytest.raises(DomainError):
        expand_3d({}, 1.0, -1)


# --------------------------------------------------------------- evaluation

def test_zero_expansion_evaluates_to_zero():
    exp = expand_2d({}, 1.0, 5)
    assert evaluate(exp, 0.4, 1.1) == 0
    assert evaluate(expand_3d({}, 1.0, 5), 0.4, 1.1, 0.3) == 0


def test_bessel_j0_expansion():
    k = 1.3
    exp = expand_2d({(0, "+"): 1}, k, 14)
    assert evaluate(exp, 0.0, 0.7) == 1
    r = np.linspace(0, 0.5, 11)
    assert_allclose(evaluate(exp, r, 0.2).real, sps.j0(k * r), rtol=1e-13, atol=1e-15)


def test_plane_wave_2d():
    k, a = 1.0, 0.9
    exp = expand_2d(plane_wave_seeds_2d(k, a, 12), k, 12)
    r, th = 0.3, 0.7
    exact = np.exp(1j * k * r * math.cos(th - a))
    assert abs(evaluate(exp, r, th) - exact) <= 1e-9


def test_plane_wave_3d():
    k, d = 1.5, np.array([0.3, -0.5, 0.8])
    d = d / np.linalg.norm(d)
    exp = expand_3d(plane_wave_seeds_3d(k, d, 14), k, 14)
    r, th, ph = 0.4, 1.1, 2.0
    x = r * np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
    assert abs(evaluate(exp, r, th, ph) - np.exp(1j * k * x @ d)) <= 1e-10


def test_negative_radius_rejected():
    with pytest.raises(DomainError):
        evaluate(expand_2d({}, 1.0, 2), -0.1, 0.0)


@settings(max_examples=30, deadline=None)
@given(alpha=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       beta=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       seed=st.integers(0, 2 ** 31))
def test_evaluation_is_linear(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    k, J = 1.4, 8
    s1 = {(n, s): complex(*rng.uniform(-1, 1, 2)) for n in range(J + 1) for s in (1, -1)}
    s2 = {(n, s): complex(*rng.uniform(-1, 1, 2)) for n in range(J + 1) for s in (1, -1)}
    combo = {key: alpha * s1[key] + beta * s2[key] for key in s1}
    r, th = rng.uniform(0, 0.6, 20), rng.uniform(0, 2 * np.pi, 20)
    lhs = evaluate(expand_2d(combo, k, J), r, th)
    rhs = alpha * evaluate(expand_2d(s1, k, J), r, th) + beta * evaluate(expand_2d(s2, k, J), r, th)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


# ----------------------------------------------------------------- residual

def test_zero_expansion_residual():
    pts = np.array([[0.1, 0.2], [0.3, -0.1]])
    assert helmholtz_residual(expand_2d({}, 1.0, 4), pts) == 0.0


def test_bessel_residual_small():
    exp = expand_2d({(0, "+"): 1}, 1.0, 14)
    rng = np.random.default_rng(3)
    radius, angle = rng.uniform(0, 0.3, 40), rng.uniform(0, 2 * np.pi, 40)
    pts = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=-1)
    assert helmholtz_residual(exp, pts) <= 1e-8


def test_residual_ratio_follows_truncation_degree():
    # k = 6 keeps the degree J - 1 coefficient well above the stencil floor
    for J in (8, 12):
        exp = expand_2d(plane_wave_seeds_2d(6.0, 0.4, J), 6.0, J)
        res, slope = residual_decay(exp, [0.1, 0.2])
        assert abs(slope - (J - 1)) <= 0.3


def test_residual_3d():
    exp = expand_3d(plane_wave_seeds_3d(6.0, [0.3, 0.2, 0.9], 9), 6.0, 9)
    res, slope = residual_decay(exp, [0.1, 0.2])
    assert abs(slope - 8) <= 0.3


def test_residual_needs_matching_dimension():
    with pytest.raises(DomainError):
        helmholtz_residual(expand_3d({}, 1.0, 2), np.zeros((3, 2)))


def test_stencil_floor_without_extrapolation():
    # a plain stencil cannot see the truncation error below its own O(h^2) floor
    exp = expand_2d(plane_wave_seeds_2d(3.0, 0.4, 10), 3.0, 10)
    pts = 0.05 * np.array([[1.0, 0.0], [0.0, 1.0]])
    plain = helmholtz_residual(exp, pts, extrapolate=False)
    richardson = helmholtz_residual(exp, pts)
    assert richardson < plain


# ----------------------------------------------------- exact coefficient identity

def test_laplacian_coefficients_close_the_recurrence():
    k = Fraction(3, 2)
    seeds = {(n, m): Fraction(n - m + 1, n + 2) for n in range(5) for m in range(-n, n + 1)}
    exp = expand_3d(seeds, k, 10)
    lap = laplacian_coefficients(exp)
    for key, val in lap.items():
        assert val == -k * k * exp.coefficients[key]
    expected = {key for key in exp.coefficients if key[0] + 2 * key[1] <= 8}
    assert set(lap) == expected


# ----------------------------------------------------------- Taylor terms

def test_lowest_term_at_vanishing_order():
    exp = expand_2d({(3, "+"): Fraction(2), (3, "-"): Fraction(-5)}, Fraction(1), 8)
    first = lowest_taylor_terms(exp, 1)[0]
    re = X1 ** 3 - X1 * X2 * X2 * 3
    im = X1 * X1 * X2 * 3 - X2 ** 3
    assert first == re * 2 + im * (-5)
    assert first.laplacian().is_zero()


def test_lowest_terms_of_j0():
    exp = expand_2d({(0, "+"): 1}, Fraction(2), 6)
    one, two = lowest_taylor_terms(exp, 2)
    assert one == HomogeneousPolynomial.constant(2, 1)
    assert two == R2 * (-1)
    assert not two.laplacian().is_zero()


def test_consecutive_degrees_are_harmonic():
    exp = expand_2d({(2, "+"): Fraction(1), (3, "-"): Fraction(4), (4, "+"): Fraction(-2)},
                    Fraction(5, 2), 9)
    for j in (2, 3):
        assert degree_term(exp, j).laplacian().is_zero()
    assert not degree_term(exp, 4).laplacian().is_zero()


def test_lowest_term_3d_is_solid_harmonic():
    exp = expand_3d({(2, 1): Fraction(1)}, Fraction(1), 6)
    (term,) = lowest_taylor_terms(exp, 1)
    assert term.degree == 2 and term.laplacian().is_zero()


def test_identically_zero_expansion_has_no_terms():
    assert lowest_taylor_terms(expand_2d({}, 1.0, 5), 2) == []
    with pytest.raises(DomainError):
        lowest_taylor_terms(expand_2d({}, 1.0, 5), 0)


def test_float_degree_term_matches_evaluation():
    rng = np.random.default_rng(9)
    seeds = {(n, m): complex(*rng.uniform(-1, 1, 2)) for n in range(4) for m in range(-n, n + 1)}
    exp = expand_3d(seeds, 1.2, 5)
    x = np.array([0.2, -0.1, 0.15])
    r = np.linalg.norm(x)
    th, ph = math.acos(x[2] / r), math.atan2(x[1], x[0])
    total = sum(complex(degree_term(exp, j).evaluate(*x)) for j in range(6))
    assert abs(total - evaluate(exp, r, th, ph)) <= 1e-13


# ------------------------------------------------------- harmonic decomposition

def _reassemble(parts, dim):
    r2 = HomogeneousPolynomial.norm_squared(dim)
    total = None
    for ell, (_, h) in enumerate(parts):
        piece = (r2 ** ell) * h if ell else h
        total = piece if total is None else total + piece
    return total


def test_decompose_norm_squared():
    parts = harmonic_decompose(R2)
    assert parts[0][1].is_zero() and parts[0][0] == 0
    assert parts[1] == (1, HomogeneousPolynomial.constant(2, 1))


def test_decompose_x1_squared():
    parts = harmonic_decompose(X1 * X1)
    assert parts[0][1] == (X1 * X1 - X2 * X2).scale(Fraction(1, 2))
    assert parts[1][1] == HomogeneousPolynomial.constant(2, Fraction(1, 2))


def test_decompose_x3_cubed():
    x3 = HomogeneousPolynomial.variable(3, 2)
    r2 = HomogeneousPolynomial.norm_squared(3)
    parts = harmonic_decompose(x3 ** 3)
    assert parts[0][1] == x3 ** 3 - r2 * x3 * Fraction(3, 5)
    assert parts[1][1] == x3 * Fraction(3, 5)


@pytest.mark.parametrize("dim,degree", [(2, 5), (2, 6), (3, 4), (3, 5)])
def test_decompose_round_trip(dim, degree):
    from cornerscatter.poly_cauchy import monomial_exponents
    rng = np.random.default_rng(degree)
    terms = {e: Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
             for e in monomial_exponents(dim, degree)}
    p = HomogeneousPolynomial(dim, degree, terms)
    parts = harmonic_decompose(p)
    assert all(h.laplacian().is_zero() for _, h in parts)
    assert _reassemble(parts, dim) == p


# ------------------------------------------------------------- serialization

@pytest.mark.parametrize("cls", [Expansion2D, Expansion3D])
def test_json_round_trip(cls):
    if cls is Expansion2D:
        exp = expand_2d(plane_wave_seeds_2d(2.0, 0.3, 6), 2.0, 6)
    else:
        exp = expand_3d(plane_wave_seeds_3d(2.0, [1, 0, 0], 5), 2.0, 5)
    doc = json.loads(json.dumps(expansion_to_json(exp)))
    back = expansion_from_json(doc)
    assert isinstance(back, cls)
    assert back.max_degree == exp.max_degree and back.k == exp.k
    for key, val in exp.coefficients.items():
        assert back.coefficients[key] == complex(val)
