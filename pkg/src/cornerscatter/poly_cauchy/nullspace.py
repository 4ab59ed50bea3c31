"""Biharmonic Cauchy problems on sectors and circular cones.

Finds all homogeneous polynomials ``p`` of a given degree with
``Lap^2 p = 0`` whose trace and normal derivative vanish on the boundary.
The same constraint rows are assembled in three arithmetics (intervals,
exact algebraic numbers, floats) from one generic routine.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import mpmath
import numpy as np
import sympy as sp

from ..errors import CertificationError, DomainError
from ..geometry import ConeGeometry, SectorGeometry
from . import linalg
from .polynomial import (HomogeneousPolynomial, legendre_coefficients, monomial_exponents,
                         polynomial_derivative)

logger = logging.getLogger(__name__)

Geometry = Union[SectorGeometry, ConeGeometry]
DEFAULT_PRECISION_BITS = 200

__all__ = ["NumberContext", "BoundaryConditionSystem", "NullspaceReport", "AffineSolution",
           "assemble_system", "cauchy_nullspace", "nullspace_report", "polynomial_in_span",
           "solid_harmonic_polynomial", "cone_basis", "wedge_nullspace_2d_family"]


class NumberContext:
    """Constants and boundary directions in one of three arithmetics."""

    def __init__(self, kind: str, geom: Geometry):
        self.kind = kind
        frac = geom.pi_fraction
        if kind == "exact":
            if frac is not None:
                angle = sp.pi * sp.Rational(frac.numerator, frac.denominator)
            else:
                # the binary value of the float is itself an exact rational angle
                angle = sp.Rational(Fraction(geom.omega).numerator,
                                    Fraction(geom.omega).denominator)
            self.cos, self.sin = sp.cos(angle), sp.sin(angle)
        elif kind == "interval":
            iv = mpmath.iv
            angle = iv.pi * frac.numerator / frac.denominator if frac is not None \
                else iv.mpf(geom.omega)
            self.cos, self.sin = iv.cos(angle), iv.sin(angle)
        elif kind == "float":
            self.cos, self.sin = math.cos(geom.omega), math.sin(geom.omega)
        else:
            raise ValueError(f"unknown arithmetic {kind!r}")

    def const(self, q):
        q = Fraction(q)
        if self.kind == "exact":
            return sp.Rational(q.numerator, q.denominator)
        if self.kind == "interval":
            return mpmath.iv.mpf(q.numerator) / q.denominator
        return q.numerator / q.denominator


@dataclass
class BoundaryConditionSystem:
    """Linear constraints on the coefficients of a degree-``d`` polynomial.

    Attributes
    ----------
    rows : list of list
        Constraint matrix in the arithmetic of ``context``.
    labels : list of str
        One label per row (``"bilap"``, ``"trace:ray2"``, ``"normal:m=1"``, ...).
    unknowns : list
        Monomial exponents (sector) or ``(l, n, m)`` solid-harmonic indices (cone).
    """

    geometry: Geometry
    degree: int
    rows: list
    labels: list
    unknowns: list
    context: NumberContext

    @property
    def shape(self):
        return len(self.rows), len(self.unknowns)


def _bilaplacian_rows(dimension: int, degree: int, ctx: NumberContext):
    basis = monomial_exponents(dimension, degree)
    if degree < 4:
        return [], basis
    target = monomial_exponents(dimension, degree - 4)
    index = {e: i for i, e in enumerate(target)}
    mat = [[Fraction(0)] * len(basis) for _ in target]
    for j, e in enumerate(basis):
        for k, c in HomogeneousPolynomial.monomial(e).bilaplacian().terms.items():
            mat[index[k]][j] = c
    return [[ctx.const(x) for x in row] for row in mat], basis


def _sector_system(geom: SectorGeometry, degree: int, ctx: NumberContext):
    rows, basis = _bilaplacian_rows(2, degree, ctx)
    labels = ["bilap"] * len(rows)
    d = degree
    c, s = ctx.cos, ctx.sin
    zero, one = ctx.const(0), ctx.const(1)
    # ray theta = 0: p(1, 0) and d/dy p(1, 0)
    rows.append([one if i == 0 else zero for i in range(d + 1)])
    rows.append([one if i == 1 else zero for i in range(d + 1)])
    labels += ["trace:ray1", "normal:ray1"]
    trace, normal = [], []
    for i in range(d + 1):
        trace.append(c ** (d - i) * s ** i if d else one)
        val = zero
        if d - i > 0:
            val = val - ctx.const(d - i) * c ** (d - i - 1) * s ** (i + 1)
        if i > 0:
            val = val + ctx.const(i) * c ** (d - i + 1) * s ** (i - 1)
        normal.append(val)
    rows += [trace, normal]
    labels += ["trace:ray2", "normal:ray2"]
    return rows, labels, basis


def cone_basis(degree: int) -> list[tuple]:
    """Indices ``(l, n, m)`` of the basis ``r^(2l) r^n P_n^|m|(cos theta) e^(i m phi)``."""
    out = []
    for ell in range(degree // 2 + 1):
        n = degree - 2 * ell
        for m in range(-n, n + 1):
            out.append((ell, n, m))
    return out


def _legendre_derivative_coefficients(n: int, m: int):
    return polynomial_derivative(legendre_coefficients(n), m)


def _poly_eval(coeffs, x, ctx):
    acc = ctx.const(0)
    for c in reversed(coeffs):
        acc = acc * x + ctx.const(c)
    return acc


def _cone_system(geom: ConeGeometry, degree: int, ctx: NumberContext):
    basis = cone_basis(degree)
    rows, labels = [], []
    zero = ctx.const(0)
    for j, (ell, n, m) in enumerate(basis):
        if ell >= 2:
            val = 4 * ell * (ell - 1) * (2 * ell + 2 * n + 1) * (2 * ell + 2 * n - 1)
            row = [zero] * len(basis)
            row[j] = ctx.const(val)
            rows.append(row)
            labels.append("bilap")
    c = ctx.cos
    one_minus_c2 = ctx.const(1) - c * c
    for m in range(-degree, degree + 1):
        am = abs(m)
        trace = [zero] * len(basis)
        normal = [zero] * len(basis)
        for j, (ell, n, mm) in enumerate(basis):
            if mm != m:
                continue
            q = _legendre_derivative_coefficients(n, am)
            dq = polynomial_derivative(q)
            qv = _poly_eval(q, c, ctx)
            # rows scaled by sin^-|m| (trace) and sin^(1-|m|) (theta derivative)
            trace[j] = qv
            normal[j] = ctx.const(am) * c * qv - one_minus_c2 * _poly_eval(dq, c, ctx)
        rows += [trace, normal]
        labels += [f"trace:m={m}", f"normal:m={m}"]
    return rows, labels, basis


def assemble_system(geom: Geometry, degree: int, kind: str = "exact") -> BoundaryConditionSystem:
    """Assemble the Cauchy constraint rows in the requested arithmetic.

    Interval assembly must run inside :func:`linalg.interval_precision`.
    """
    if degree < 0:
        raise DomainError("degree must be non-negative")
    ctx = NumberContext(kind, geom)
    if isinstance(geom, SectorGeometry):
        rows, labels, basis = _sector_system(geom, degree, ctx)
    elif isinstance(geom, ConeGeometry):
        rows, labels, basis = _cone_system(geom, degree, ctx)
    else:
        raise DomainError("geometry must be a sector or a cone")
    return BoundaryConditionSystem(geom, degree, rows, labels, basis, ctx)


# --------------------------------------------------------------------------
# solid harmonics in Cartesian form


def solid_harmonic_polynomial(n: int, m: int) -> HomogeneousPolynomial:
    """``r^n P_n^|m|(cos theta) e^(i m phi)`` as an exact polynomial in x1, x2, x3.

    Equals ``(x1 + i sgn(m) x2)^|m| * sum_j q_j x3^j |x|^(n-|m|-j)`` where
    ``q_j`` are the coefficients of the |m|-th derivative of ``P_n``.
    """
    am = abs(m)
    if am > n:
        raise DomainError("need |m| <= n")
    q = _legendre_derivative_coefficients(n, am)
    r2 = HomogeneousPolynomial.norm_squared(3)
    z = HomogeneousPolynomial.variable(3, 2)
    radial = HomogeneousPolynomial.zero(3, n - am)
    for j, coef in enumerate(q):
        if coef == 0:
            continue
        rest = n - am - j
        if rest < 0 or rest % 2:
            continue
        radial = radial + (z ** j) * (r2 ** (rest // 2)) * coef
    if am == 0:
        return radial
    unit = sp.I if m > 0 else -sp.I
    xy = HomogeneousPolynomial(3, 1, {(1, 0, 0): 1, (0, 1, 0): unit})
    return (xy ** am) * radial


def _cone_vector_to_polynomial(vec, basis, degree) -> HomogeneousPolynomial:
    out = HomogeneousPolynomial.zero(3, degree)
    r2 = HomogeneousPolynomial.norm_squared(3)
    for coef, (ell, n, m) in zip(vec, basis):
        if coef == 0:
            continue
        out = out + (r2 ** ell) * solid_harmonic_polynomial(n, m) * coef
    return out


def _real_basis(polys: list[HomogeneousPolynomial]) -> list[HomogeneousPolynomial]:
    """Split complex polynomials into real and imaginary parts and keep a basis."""
    if not polys:
        return []
    cand = []
    for p in polys:
        for part in (p.real_part(), p.imag_part()):
            if not part.is_zero():
                cand.append(part)
    if not cand:
        return []
    dim, deg = cand[0].dimension, cand[0].degree
    basis = monomial_exponents(dim, deg)
    chosen, rows = [], []
    for p in cand:
        trial = rows + [[sp.sympify(_sym(c)) for c in p.vector(basis)]]
        if linalg.exact_rank(trial) > len(rows):
            rows = trial
            chosen.append(p)
    return chosen


def _sym(c):
    if isinstance(c, Fraction):
        return sp.Rational(c.numerator, c.denominator)
    return c


def polynomial_in_span(basis: list[HomogeneousPolynomial], p: HomogeneousPolynomial) -> bool:
    """Exact test of ``p`` lying in the span of ``basis``."""
    if p.is_zero():
        return True
    if not basis:
        return False
    mono = monomial_exponents(p.dimension, p.degree)
    rows = [[_sym(c) for c in b.vector(mono)] for b in basis]
    return linalg.exact_rank(rows + [[_sym(c) for c in p.vector(mono)]]) == linalg.exact_rank(rows)


# --------------------------------------------------------------------------
# null spaces


@dataclass
class NullspaceReport:
    """Null space of the Cauchy system at one degree, with provenance of the answer.

    ``method`` is ``"interval"`` when full rank was certified by interval
    elimination, ``"exact"`` when the exact algebraic path decided, and
    ``"float"`` for an uncertified numerical answer.
    """

    geometry: Geometry
    degree: int
    dimension: int
    basis: list = field(default_factory=list)
    method: str = "interval"
    certified: bool = True
    precision_bits: Optional[int] = None
    max_interval_width: Optional[float] = None
    min_pivot_magnitude: Optional[float] = None
    float_rank: Optional[int] = None
    exact_rank: Optional[int] = None
    shape: tuple = (0, 0)

    def to_json(self) -> dict:
        geom = self.geometry
        return {
            "geometry": "sector" if isinstance(geom, SectorGeometry) else "cone",
            "omega": geom.omega,
            "degree": self.degree,
            "dimension": self.dimension,
            "method": self.method,
            "certified": self.certified,
            "precision_bits": self.precision_bits,
            "max_interval_width": self.max_interval_width,
            "min_pivot_magnitude": self.min_pivot_magnitude,
            "float_rank": self.float_rank,
            "exact_rank": self.exact_rank,
            "rows": self.shape[0],
            "unknowns": self.shape[1],
            "basis": [p.to_json() for p in self.basis],
        }


def _exact_null_basis(geom, degree):
    system = assemble_system(geom, degree, "exact")
    ncols = len(system.unknowns)
    rank = linalg.exact_rank(system.rows)
    vectors = linalg.exact_nullspace(system.rows, ncols) if rank < ncols else []
    if isinstance(geom, SectorGeometry):
        polys = [HomogeneousPolynomial.from_vector(2, degree, v, system.unknowns) for v in vectors]
        polys = [p for p in polys if not p.is_zero()]
    else:
        polys = _real_basis([_cone_vector_to_polynomial(v, system.unknowns, degree)
                             for v in vectors])
    return rank, polys, system


def nullspace_report(geom: Geometry, degree: int, method: str = "auto",
                     precision_bits: int = DEFAULT_PRECISION_BITS,
                     allow_exact: bool = True) -> NullspaceReport:
    """Compute the Cauchy null space at one degree and report how it was decided.

    Parameters
    ----------
    method : {"auto", "interval", "exact", "float"}
        ``"auto"`` tries interval certification first and falls back to
        exact arithmetic when the angle is a rational multiple of pi.
    precision_bits : int
        Working precision of the interval arithmetic.
    allow_exact : bool
        Disable the exact fallback (used to exercise certification failure).

    Raises
    ------
    CertificationError
        If the interval path is inconclusive and no exact path is allowed.
    """
    fsys = assemble_system(geom, degree, "float")
    frank = linalg.float_rank(fsys.rows)
    ncols = len(fsys.unknowns)
    shape = fsys.shape

    if method == "float":
        null = linalg.float_nullspace(fsys.rows, ncols)
        polys = []
        if isinstance(geom, SectorGeometry):
            polys = [HomogeneousPolynomial.from_vector(2, degree, list(v), fsys.unknowns)
                     for v in null]
        else:
            polys = [_cone_vector_to_polynomial(list(v), fsys.unknowns, degree).to_float()
                     for v in null]
        return NullspaceReport(geom, degree, ncols - frank, polys, "float", False,
                               float_rank=frank, shape=shape)

    if method in ("auto", "interval"):
        with linalg.interval_precision(precision_bits):
            isys = assemble_system(geom, degree, "interval")
            cert = linalg.interval_full_rank(isys.rows, precision_bits)
        if cert.certified:
            return NullspaceReport(geom, degree, 0, [], "interval", True, precision_bits,
                                   cert.max_entry_width, cert.min_pivot_magnitude,
                                   frank, None, shape)
        logger.info("interval elimination inconclusive at degree %d (rank >= %d of %d)",
                    degree, cert.rank_lower, cert.columns)
        if method == "interval" or not allow_exact or geom.pi_fraction is None:
            raise CertificationError(
                f"interval rank inconclusive at degree {degree} "
                f"({precision_bits} bits, rank >= {cert.rank_lower} of {cert.columns}) "
                "and no exact fallback is available")
    rank, polys, _ = _exact_null_basis(geom, degree)
    return NullspaceReport(geom, degree, ncols - rank, polys, "exact", True,
                           float_rank=frank, exact_rank=rank, shape=shape)


def cauchy_nullspace(geom: Geometry, degree: int, **kwargs) -> list[HomogeneousPolynomial]:
    """Basis of ``{p in P_degree : Lap^2 p = 0, p = d_nu p = 0 on the boundary}``.

    Empty for every sector with opening other than pi and every cone with
    half-angle other than pi/2. The flat cases return their nontrivial
    null spaces (for instance ``x2^2`` on the half-plane).
    """
    return nullspace_report(geom, degree, **kwargs).basis


# --------------------------------------------------------------------------
# inhomogeneous wedge problem


@dataclass
class AffineSolution:
    """Solution set ``particular + span(directions)``; empty when ``particular`` is None."""

    particular: Optional[HomogeneousPolynomial]
    directions: list

    @property
    def is_empty(self) -> bool:
        return self.particular is None

    def contains(self, p: HomogeneousPolynomial) -> bool:
        if self.particular is None:
            return False
        return polynomial_in_span(self.directions, p - self.particular)


def wedge_nullspace_2d_family(geom: SectorGeometry, degree: int,
                              rhs_harmonic: HomogeneousPolynomial) -> AffineSolution:
    """Solve ``Lap q = rhs`` in ``P_degree`` with ``q = d_nu q = 0`` on both rays.

    ``rhs_harmonic`` must be harmonic of degree ``degree - 2``.
    """
    if not isinstance(geom, SectorGeometry):
        raise DomainError("wedge problems are posed on sectors")
    if rhs_harmonic.dimension != 2:
        raise DomainError("right-hand side must be a polynomial in two variables")
    if not rhs_harmonic.laplacian().is_zero():
        raise DomainError("right-hand side must be harmonic")
    if not rhs_harmonic.is_zero() and rhs_harmonic.degree != degree - 2:
        raise DomainError("right-hand side must have degree `degree - 2`")
    ctx = NumberContext("exact", geom)
    basis = monomial_exponents(2, degree)
    rows, rhs = [], []
    if degree >= 2:
        target = monomial_exponents(2, degree - 2)
        index = {e: i for i, e in enumerate(target)}
        lap = [[Fraction(0)] * len(basis) for _ in target]
        for j, e in enumerate(basis):
            for k, c in HomogeneousPolynomial.monomial(e).laplacian().terms.items():
                lap[index[k]][j] = c
        rows += [[ctx.const(x) for x in row] for row in lap]
        rhs += [_sym(rhs_harmonic.coefficient(e)) for e in target]
    sys_rows, labels, _ = _sector_system(geom, degree, ctx)
    keep = [r for r, lab in zip(sys_rows, labels) if lab != "bilap"]
    rows += keep
    rhs += [sp.Integer(0)] * len(keep)
    particular, null = linalg.exact_solve(rows, rhs)
    directions = [HomogeneousPolynomial.from_vector(2, degree, v, basis) for v in null]
    directions = [d for d in directions if not d.is_zero()]
    if particular is None:
        return AffineSolution(None, directions)
    return AffineSolution(HomogeneousPolynomial.from_vector(2, degree, particular, basis),
                          directions)
