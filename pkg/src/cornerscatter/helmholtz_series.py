"""Local series expansions of Helmholtz solutions around the origin.

In 2D a solution is expanded as::

    u = sum_{n, m} r^(n + 2m) (c+_{n,m} cos(n theta) + c-_{n,m} sin(n theta)),

and in 3D as::

    u = sum_{n, l, m} a^(l)_{n,m} r^(n + 2l) Y_n^m(theta, phi).

Only the ``m = 0`` (2D) and ``l = 0`` (3D) coefficients are free; the rest
follow from the recurrences implemented here. Coefficients may be Python
complex numbers or exact ``Fraction`` values (with an exact wavenumber),
in which case all derived quantities stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
import sympy as sp

from .errors import DomainError
from .poly_cauchy.nullspace import solid_harmonic_polynomial
from .poly_cauchy.polynomial import HomogeneousPolynomial, monomial_exponents
from .specfun import harmonic_norm, legendre_table

__all__ = [
    "Expansion2D", "Expansion3D", "expand_2d", "expand_3d", "plane_wave_seeds_2d",
    "plane_wave_seeds_3d", "evaluate", "helmholtz_residual", "residual_decay",
    "laplacian_coefficients", "degree_term",
    "lowest_taylor_terms", "harmonic_decompose", "expansion_to_json", "expansion_from_json",
]


@dataclass(frozen=True)
class Expansion2D:
    """Truncated 2D expansion; ``coefficients[(n, m, sign)]`` with sign +1 (cos) or -1 (sin)."""

    k: object
    max_degree: int
    coefficients: Mapping = field(default_factory=dict)

    dimension = 2


@dataclass(frozen=True)
class Expansion3D:
    """Truncated 3D expansion; ``coefficients[(n, l, m)]``."""

    k: object
    max_degree: int
    coefficients: Mapping = field(default_factory=dict)

    dimension = 3


def _as_exact(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


def _check_k(k):
    if not k > 0:
        raise DomainError("wavenumber must be positive")


def expand_2d(seeds: Mapping, k, max_degree: int) -> Expansion2D:
    """Populate all 2D coefficients from the ``m = 0`` seeds.

    Parameters
    ----------
    seeds : mapping
        ``(n, sign) -> c`` with ``sign`` in ``{+1, -1}`` (or ``"+"``/``"-"``).
        Seeds with ``n > max_degree`` are ignored; the sine seed at ``n = 0``
        is dropped.
    k : float or Fraction
        Wavenumber.
    max_degree : int
        Keep coefficients with ``n + 2m <= max_degree``.
    """
    _check_k(k)
    if max_degree < 0:
        raise DomainError("max_degree must be non-negative")
    k2 = _as_exact(k) * _as_exact(k)
    coeffs = {}
    for (n, sign), c0 in seeds.items():
        sign = _parse_sign(sign)
        n = int(n)
        if n < 0:
            raise DomainError("seed degree must be non-negative")
        if n > max_degree or (n == 0 and sign < 0):
            continue
        c = _as_exact(c0)
        m = 0
        while n + 2 * m <= max_degree:
            coeffs[(n, m, sign)] = coeffs.get((n, m, sign), 0) + c
            c = -k2 / (4 * (m + 1) * (n + m + 1)) * c
            m += 1
    return Expansion2D(k, max_degree, coeffs)


def _parse_sign(sign) -> int:
    if sign in ("+", 1, "cos"):
        return 1
    if sign in ("-", -1, "sin"):
        return -1
    raise DomainError(f"sign must be + or -, got {sign!r}")


def expand_3d(seeds: Mapping, k, max_degree: int) -> Expansion3D:
    """Populate all 3D coefficients from the ``l = 0`` seeds ``(n, m) -> a``."""
    _check_k(k)
    if max_degree < 0:
        raise DomainError("max_degree must be non-negative")
    k2 = _as_exact(k) * _as_exact(k)
    coeffs = {}
    for (n, m), a0 in seeds.items():
        n, m = int(n), int(m)
        if abs(m) > n:
            raise DomainError(f"seed index violates |m| <= n: (n={n}, m={m})")
        if n > max_degree:
            continue
        a = _as_exact(a0)
        ell = 0
        while n + 2 * ell <= max_degree:
            coeffs[(n, ell, m)] = coeffs.get((n, ell, m), 0) + a
            a = -k2 / (2 * (ell + 1) * (2 * ell + 2 * n + 3)) * a
            ell += 1
    return Expansion3D(k, max_degree, coeffs)


def plane_wave_seeds_2d(k: float, direction_angle: float, max_degree: int) -> dict:
    """Seeds reproducing ``exp(i k x . d)`` with ``d = (cos a, sin a)``.

    From the Jacobi-Anger expansion, ``c+_{n,0} = eps_n i^n (k/2)^n / n! cos(n a)``
    and ``c-_{n,0}`` the same with ``sin(n a)``, where ``eps_0 = 1`` and
    ``eps_n = 2`` otherwise.
    """
    seeds = {}
    for n in range(max_degree + 1):
        base = (1 if n == 0 else 2) * (1j ** n) * (k / 2) ** n / math.factorial(n)
        seeds[(n, 1)] = base * math.cos(n * direction_angle)
        if n:
            seeds[(n, -1)] = base * math.sin(n * direction_angle)
    return seeds


def plane_wave_seeds_3d(k: float, direction, max_degree: int) -> dict:
    """Seeds reproducing ``exp(i k x . d)`` for a unit vector ``d``.

    ``a^(0)_{n,m} = 4 pi i^n k^n / (2n+1)!! * conj(Y_n^m(d))``.
    """
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    theta = math.acos(max(-1.0, min(1.0, d[2])))
    phi = math.atan2(d[1], d[0])
    table = legendre_table(max_degree, math.cos(theta))
    seeds = {}
    dfact = 1.0
    for n in range(max_degree + 1):
        dfact *= (2 * n + 1)
        for m in range(-n, n + 1):
            y = harmonic_norm(n, m) * table[n, abs(m)] * np.exp(1j * m * phi)
            seeds[(n, m)] = 4 * math.pi * (1j ** n) * k ** n / dfact * np.conj(y)
    return seeds


def _num(c, dtype=complex):
    if isinstance(c, Fraction):
        return dtype(c.numerator) / dtype(c.denominator)
    return c


def _evaluate_2d(exp: Expansion2D, r, theta, dtype=np.float64):
    r = np.asarray(r, dtype=dtype)
    theta = np.asarray(theta, dtype=dtype)
    cdtype = np.result_type(dtype, np.complex64)
    out = np.zeros(np.broadcast(r, theta).shape, dtype=cdtype)
    for (n, m, sign), c in exp.coefficients.items():
        ang = np.cos(n * theta) if sign > 0 else np.sin(n * theta)
        cval = _num(c)
        cval = cdtype.type(complex(cval)) if dtype is not np.float64 else cval
        out = out + cval * r ** (n + 2 * m) * ang
    return out


def _evaluate_3d(exp: Expansion3D, r, theta, phi, dtype=np.float64):
    r = np.asarray(r, dtype=dtype)
    theta = np.asarray(theta, dtype=dtype)
    phi = np.asarray(phi, dtype=dtype)
    shape = np.broadcast(r, theta, phi).shape
    cdtype = np.result_type(dtype, np.complex64)
    out = np.zeros(shape, dtype=cdtype)
    if not exp.coefficients:
        return out
    nmax = max(n for n, _, _ in exp.coefficients)
    table = legendre_table(nmax, np.cos(theta), dtype=dtype)
    for (n, ell, m), a in exp.coefficients.items():
        norm = dtype(harmonic_norm(n, m)) if dtype is not np.float64 else harmonic_norm(n, m)
        y = norm * table[n, abs(m)] * np.exp(1j * m * phi.astype(dtype))
        aval = _num(a)
        aval = cdtype.type(complex(aval)) if dtype is not np.float64 else aval
        out = out + aval * r ** (n + 2 * ell) * y
    return out


def evaluate(exp, r, theta, phi=None):
    """Evaluate a truncated expansion at polar (2D) or spherical (3D) coordinates."""
    if np.any(np.asarray(r) < 0):
        raise DomainError("radius must be non-negative")
    if isinstance(exp, Expansion2D):
        val = _evaluate_2d(exp, r, theta)
    else:
        val = _evaluate_3d(exp, r, theta, 0.0 if phi is None else phi)
    return val if np.ndim(val) else complex(val)


def _evaluate_cartesian(exp, pts, dtype):
    pts = np.asarray(pts, dtype=dtype)
    if isinstance(exp, Expansion2D):
        x, y = pts[..., 0], pts[..., 1]
        return _evaluate_2d(exp, np.hypot(x, y), np.arctan2(y, x), dtype)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    safe = np.where(r > 0, r, 1)
    theta = np.arccos(np.clip(z / safe, -1, 1))
    return _evaluate_3d(exp, r, theta, np.arctan2(y, x), dtype)


def _stencil_laplacian(exp, base, center, h):
    dim = exp.dimension
    lap = -2 * dim * center
    for axis in range(dim):
        shift = np.zeros(dim, dtype=base.dtype)
        shift[axis] = h
        lap = lap + _evaluate_cartesian(exp, base + shift, base.dtype.type) \
            + _evaluate_cartesian(exp, base - shift, base.dtype.type)
    return lap / (h * h)


def helmholtz_residual(exp, sample_points, k=None, step: float = 1e-4,
                       extrapolate: bool = True) -> float:
    """Max of ``|Lap u + k^2 u|`` over Cartesian sample points.

    Uses the 5-point (2D) or 7-point (3D) stencil with the given step,
    evaluated in extended precision. With ``extrapolate`` the stencil is
    applied at ``step`` and ``2 step`` and the two are Richardson-combined,
    which removes the ``O(step^2)`` stencil error. Without it that error
    (about ``step^2/12`` times fourth derivatives) puts a floor under the
    residual that does not shrink with the radius.
    """
    k = float(exp.k if k is None else k)
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    dim = exp.dimension
    if pts.shape[-1] != dim:
        raise DomainError(f"sample points must have {dim} coordinates")
    ld = np.longdouble
    h = ld(step)
    base = pts.astype(ld)
    center = _evaluate_cartesian(exp, base, ld)
    lap = _stencil_laplacian(exp, base, center, h)
    if extrapolate:
        lap = (4 * lap - _stencil_laplacian(exp, base, center, 2 * h)) / 3
    res = lap + ld(k) ** 2 * center
    return float(np.max(np.abs(res)))


def _circle_points(dim: int, radius: float, count: int) -> np.ndarray:
    if dim == 2:
        a = 2 * np.pi * (np.arange(count) + 0.5) / count
        return radius * np.stack([np.cos(a), np.sin(a)], axis=-1)
    # golden-angle spiral on the sphere
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    phi = np.pi * (3 - np.sqrt(5)) * i
    s = np.sqrt(1 - z * z)
    return radius * np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)


def residual_decay(exp, radii, count: int = 16, step: float = 1e-4) -> tuple[np.ndarray, float]:
    """Residuals on spheres of the given radii and their log-log slope.

    A truncation at degree ``J`` leaves a residual of order ``r^(J-1)``
    near the origin, so the fitted slope should approach ``J - 1`` while
    the residual stays above the stencil floor. (The leading residual is
    ``k^2`` times the degree ``J - 1`` term; if that term vanishes, for
    instance when every seed has the parity of ``J``, the slope is ``J``.)
    """
    radii = np.asarray(radii, dtype=float)
    res = np.array([helmholtz_residual(exp, _circle_points(exp.dimension, r, count), step=step)
                    for r in radii])
    slope = float(np.polyfit(np.log(radii), np.log(res), 1)[0])
    return res, slope


def laplacian_coefficients(exp: Expansion3D) -> dict:
    """Coefficients of ``Lap u`` in the same basis, applied term by term.

    Uses ``Lap(r^(n+2l) Y_n^m) = 2l(2l+2n+1) r^(n+2l-2) Y_n^m``. For an
    expansion built by :func:`expand_3d` the result equals ``-k^2`` times the
    coefficients of degree at most ``max_degree - 2``.
    """
    out = {}
    for (n, ell, m), a in exp.coefficients.items():
        if ell == 0:
            continue
        out[(n, ell - 1, m)] = 2 * ell * (2 * ell + 2 * n + 1) * a
    return out


# --------------------------------------------------------------------------
# homogeneous Taylor terms


def _sym(c):
    if isinstance(c, Fraction):
        return sp.Rational(c.numerator, c.denominator)
    if isinstance(c, complex):
        return sp.Float(c.real) + sp.I * sp.Float(c.imag) if c.imag else sp.Float(c.real)
    return sp.sympify(c)


def _cos_sin_polys(n: int):
    """Re and Im of ``(x1 + i x2)^n`` as exact polynomials."""
    re, im = {}, {}
    for j in range(n + 1):
        coef = math.comb(n, j)
        exps = (n - j, j)
        if j % 4 == 0:
            re[exps] = coef
        elif j % 4 == 1:
            im[exps] = coef
        elif j % 4 == 2:
            re[exps] = -coef
        else:
            im[exps] = -coef
    return HomogeneousPolynomial(2, n, re), HomogeneousPolynomial(2, n, im)


def _degree_term_2d(exp: Expansion2D, j: int) -> HomogeneousPolynomial:
    out = HomogeneousPolynomial.zero(2, j)
    r2 = HomogeneousPolynomial.norm_squared(2)
    for (n, m, sign), c in exp.coefficients.items():
        if n + 2 * m != j or c == 0:
            continue
        re, im = _cos_sin_polys(n)
        out = out + (r2 ** m) * (re if sign > 0 else im) * c
    return out


def _degree_term_3d(exp: Expansion3D, j: int) -> HomogeneousPolynomial:
    out = HomogeneousPolynomial.zero(3, j)
    r2 = HomogeneousPolynomial.norm_squared(3)
    exact = all(isinstance(a, (Fraction, int)) for a in exp.coefficients.values())
    for (n, ell, m), a in exp.coefficients.items():
        if n + 2 * ell != j or a == 0:
            continue
        am = abs(m)
        if exact:
            norm = sp.sqrt(sp.Rational(2 * n + 1) / (4 * sp.pi)
                           * sp.factorial(n - am) / sp.factorial(n + am))
            coef = _sym(a) * norm
        else:
            coef = complex(_num(a)) * harmonic_norm(n, m)
        term = (r2 ** ell) * solid_harmonic_polynomial(n, m)
        if not exact:
            term = term.to_float()
        out = out + term * coef
    return out


def lowest_taylor_terms(exp, count: int) -> list[HomogeneousPolynomial]:
    """The ``count`` lowest nonvanishing homogeneous Taylor terms.

    The degree-``j`` term collects every coefficient with ``n + 2m = j``
    (2D) or ``n + 2l = j`` (3D). If the expansion vanishes below degree
    ``M``, the terms of degree ``M`` and ``M + 1`` are harmonic; note that
    the lowest nonvanishing terms need not be of consecutive degree.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    out = []
    for j in range(exp.max_degree + 1):
        term = _degree_term_2d(exp, j) if isinstance(exp, Expansion2D) else _degree_term_3d(exp, j)
        if not term.is_zero():
            out.append(term)
            if len(out) == count:
                break
    return out


def degree_term(exp, j: int) -> HomogeneousPolynomial:
    """The homogeneous Taylor term of degree ``j`` (possibly zero)."""
    return _degree_term_2d(exp, j) if isinstance(exp, Expansion2D) else _degree_term_3d(exp, j)


def harmonic_decompose(p: HomogeneousPolynomial) -> list[tuple]:
    """Write ``p = sum_l b_l |x|^(2l) H_(n-2l)`` with harmonic ``H``.

    Each step solves the exact linear system ``Lap(|x|^2 g) = Lap p`` for
    ``g`` in ``P_(n-2)``; then ``H_n = p - |x|^2 g`` is harmonic and the
    procedure recurses on ``g``.

    Returns
    -------
    list of (b, H)
        Ordered by ``l = 0, 1, ...``. ``b`` is 1 when ``H`` is nonzero and 0
        when that harmonic component vanishes (``H`` is then the zero
        polynomial of the right degree).
    """
    from .poly_cauchy import linalg

    dim = p.dimension
    out = []
    current = p
    degree = p.degree
    r2 = HomogeneousPolynomial.norm_squared(dim)
    while True:
        if degree < 2:
            out.append((0 if current.is_zero() else 1, current))
            return out
        lap = current.laplacian()
        if lap.is_zero():
            out.append((0 if current.is_zero() else 1, current))
            for d in range(degree - 2, -1, -2):
                out.append((0, HomogeneousPolynomial.zero(dim, d)))
            return out
        basis = monomial_exponents(dim, degree - 2)
        images = [(r2 * HomogeneousPolynomial.monomial(e)).laplacian() for e in basis]
        rows = [[_sym(img.coefficient(e)) for img in images] for e in basis]
        rhs = [_sym(lap.coefficient(e)) for e in basis]
        sol, _ = linalg.exact_solve(rows, rhs)
        g = HomogeneousPolynomial.from_vector(dim, degree - 2, sol, basis)
        h = current - r2 * g
        out.append((0 if h.is_zero() else 1, h))
        current = g
        degree -= 2


# --------------------------------------------------------------------------
# serialization


def _pair(c):
    z = complex(_num(c))
    return z.real, z.imag


def expansion_to_json(exp) -> dict:
    coeffs = []
    for idx in sorted(exp.coefficients):
        re, im = _pair(exp.coefficients[idx])
        coeffs.append([list(idx), re, im])
    return {"schema": "cornerscatter.expansion/1", "dimension": exp.dimension,
            "k": float(exp.k), "J": exp.max_degree, "coefficients": coeffs}


def expansion_from_json(doc: Mapping):
    coeffs = {tuple(int(i) for i in idx): complex(re, im) for idx, re, im in doc["coefficients"]}
    cls = Expansion2D if int(doc["dimension"]) == 2 else Expansion3D
    return cls(float(doc["k"]), int(doc["J"]), coeffs)
