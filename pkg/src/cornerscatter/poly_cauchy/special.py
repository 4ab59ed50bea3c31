"""Special solutions of ``Lap v = p`` on sectors and cones for homogeneous ``p``.

Away from resonance the solution is a homogeneous polynomial of degree
``kappa + 2`` satisfying the boundary condition. At resonance a logarithmic
term is needed:

* sectors, Dirichlet: ``C r^mu (ln r sin(mu theta) + theta cos(mu theta))``
* sectors, Neumann:   ``C r^mu (ln r cos(mu theta) - theta sin(mu theta))``
* cones: ``c r^mu ln r Y_mu^m`` plus a smooth angular corrector, which is
  not constructed here.

with ``mu = kappa + 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

import numpy as np
import sympy as sp

from .. import _kernels
from ..errors import DomainError
from ..geometry import BoundaryCondition, ConeGeometry, SectorGeometry
from ..specfun import cap_quadrature, harmonic_norm, legendre_table
from . import linalg
from .nullspace import NumberContext, solid_harmonic_polynomial
from .polynomial import HomogeneousPolynomial, monomial_exponents

__all__ = ["LogTerm", "SpecialSolution", "SolidHarmonicSum", "ResidualReport",
           "is_resonant_2d", "special_solution_2d", "special_solution_cone",
           "zeta", "verify_special_solution"]

RESONANCE_TOL = 1e-10


@dataclass(frozen=True)
class LogTerm:
    """One logarithmic term ``C r^mu L(theta, ...)``.

    ``profile`` names the angular form: ``"sector-dirichlet"``,
    ``"sector-neumann"`` or ``"cone"`` (``ln r Y_mu^m``; corrector omitted).
    """

    coefficient: complex
    profile: str
    exponent: int
    order: int = 0
    source: Optional[tuple] = None


@dataclass
class SpecialSolution:
    """Polynomial part plus optional logarithmic terms.

    ``resonant`` is True exactly when ``log_terms`` is non-empty. For cones
    the angular corrector of the log term is not built; ``corrector_omitted``
    records that.
    """

    polynomial_part: HomogeneousPolynomial
    log_terms: list = field(default_factory=list)
    resonant: bool = False
    geometry: Union[SectorGeometry, ConeGeometry, None] = None
    boundary_condition: Optional[BoundaryCondition] = None
    harmonic_terms: dict = field(default_factory=dict)
    zeta: dict = field(default_factory=dict)
    exact: bool = True
    corrector_omitted: bool = False

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at Cartesian points (2D only for the log part)."""
        pts = np.asarray(points, dtype=float)
        dim = self.polynomial_part.dimension
        if self.harmonic_terms and dim == 3:
            val = _solid_sum_eval(self.harmonic_terms, self.polynomial_part.degree, pts)
        else:
            val = np.asarray(self.polynomial_part.evaluate(*np.moveaxis(pts, -1, 0)),
                             dtype=complex)
        for term in self.log_terms:
            if term.profile.startswith("sector"):
                val = val + term.coefficient * _sector_log_value(term, pts)
        return val


# --------------------------------------------------------------------------
# sectors


def is_resonant_2d(kappa: int, geom: SectorGeometry) -> bool:
    """True when ``(kappa + 2) omega / pi`` is a positive integer."""
    if geom.pi_fraction is not None:
        x = (kappa + 2) * geom.pi_fraction
        return x.denominator == 1 and x > 0
    x = (kappa + 2) * geom.omega / math.pi
    return abs(x - round(x)) < 1e-12 and round(x) > 0


def _sector_log_value(term: LogTerm, pts):
    mu = term.exponent
    x, y = pts[..., 0], pts[..., 1]
    r = np.hypot(x, y)
    th = np.mod(np.arctan2(y, x), 2 * np.pi)
    lr = np.log(np.where(r > 0, r, 1.0))
    if term.profile == "sector-dirichlet":
        ang = lr * np.sin(mu * th) + th * np.cos(mu * th)
    else:
        ang = lr * np.cos(mu * th) - th * np.sin(mu * th)
    return np.where(r > 0, r ** mu * ang, 0.0)


def _sector_log_dtheta(term: LogTerm, r, th):
    mu = term.exponent
    lr = np.log(r)
    if term.profile == "sector-dirichlet":
        d = mu * lr * np.cos(mu * th) + np.cos(mu * th) - mu * th * np.sin(mu * th)
    else:
        d = -mu * lr * np.sin(mu * th) - np.sin(mu * th) - mu * th * np.cos(mu * th)
    return r ** mu * d


def _ray_rows(degree, ctx, bc):
    c, s = ctx.cos, ctx.sin
    zero, one = ctx.const(0), ctx.const(1)
    d = degree
    if bc is BoundaryCondition.DIRICHLET:
        ray1 = [one if i == 0 else zero for i in range(d + 1)]
        ray2 = [c ** (d - i) * s ** i for i in range(d + 1)]
    else:
        ray1 = [one if i == 1 else zero for i in range(d + 1)]
        ray2 = []
        for i in range(d + 1):
            val = zero
            if d - i > 0:
                val = val - ctx.const(d - i) * c ** (d - i - 1) * s ** (i + 1)
            if i > 0:
                val = val + ctx.const(i) * c ** (d - i + 1) * s ** (i - 1)
            ray2.append(val)
    return ray1, ray2


def special_solution_2d(p: HomogeneousPolynomial, geom: SectorGeometry, bc) -> SpecialSolution:
    """Solve ``Lap v = p`` on the sector with a homogeneous boundary condition.

    Parameters
    ----------
    p : HomogeneousPolynomial
        Right-hand side of degree ``kappa`` in two variables.
    geom : SectorGeometry
    bc : BoundaryCondition or str

    Notes
    -----
    With an exact angle (rational multiple of pi) the solve is exact; else
    the boundary rows use floating-point ``cos``/``sin`` and ``exact`` is
    False on the result. At resonance the free harmonic component that
    already satisfies both boundary conditions is set to zero.
    """
    bc = BoundaryCondition.parse(bc)
    if p.dimension != 2:
        raise DomainError("special_solution_2d needs a polynomial in two variables")
    kappa = p.degree
    mu = kappa + 2
    exact = geom.pi_fraction is not None
    ctx = NumberContext("exact" if exact else "float", geom)
    basis = monomial_exponents(2, mu)
    target = monomial_exponents(2, kappa)
    index = {e: i for i, e in enumerate(target)}
    lap = [[Fraction(0)] * len(basis) for _ in target]
    for j, e in enumerate(basis):
        for k, c in HomogeneousPolynomial.monomial(e).laplacian().terms.items():
            lap[index[k]][j] = c
    rows = [[ctx.const(x) for x in row] for row in lap]
    rhs = [_to_ctx(p.coefficient(e), ctx) for e in target]
    ray1, ray2 = _ray_rows(mu, ctx, bc)
    resonant = is_resonant_2d(kappa, geom)
    profile = "sector-dirichlet" if bc is BoundaryCondition.DIRICHLET else "sector-neumann"

    if not resonant:
        rows += [ray1, ray2]
        rhs += [ctx.const(0), ctx.const(0)]
        sol = _solve(rows, rhs, exact)
        q = HomogeneousPolynomial.from_vector(2, mu, sol, basis)
        return SpecialSolution(q, [], False, geom, bc, exact=exact)

    # unknowns: polynomial coefficients plus the log coefficient C
    omega = sp.pi * sp.Rational(geom.pi_fraction.numerator, geom.pi_fraction.denominator) \
        if exact else geom.omega
    cos_mu = sp.cos(mu * omega) if exact else math.cos(mu * omega)
    if bc is BoundaryCondition.DIRICHLET:
        log_at_ray2 = omega * cos_mu          # L_D(1, omega)
    else:
        log_at_ray2 = -mu * omega * cos_mu    # d/dtheta L_N at (1, omega)
    zero = ctx.const(0)
    rows = [row + [zero] for row in rows]
    rows.append(ray1 + [zero])
    rows.append(ray2 + [log_at_ray2])
    rhs += [zero, zero]
    # pin the resonant harmonic that satisfies both boundary conditions
    harmonic = _resonant_harmonic(mu, geom, bc, ctx)
    rows.append(harmonic + [zero])
    rhs.append(zero)
    sol = _solve(rows, rhs, exact)
    q = HomogeneousPolynomial.from_vector(2, mu, sol[:-1], basis)
    coef = sol[-1]
    coef = complex(coef) if not isinstance(coef, (Fraction, int)) else coef
    return SpecialSolution(q, [LogTerm(coef, profile, mu)], True, geom, bc, exact=exact)


def _resonant_harmonic(mu, geom, bc, ctx):
    # Im (x1 + i x2)^mu for Dirichlet, Re for Neumann, as a coefficient row
    row = []
    for j in range(mu + 1):
        coef = math.comb(mu, j)
        want = (j % 2 == 1) if bc is BoundaryCondition.DIRICHLET else (j % 2 == 0)
        sign = (-1) ** (j // 2) if want else 0
        row.append(ctx.const(coef * sign))
    return row


def _to_ctx(c, ctx):
    if isinstance(c, Fraction):
        return ctx.const(c)
    if ctx.kind == "exact":
        return sp.sympify(c)
    return complex(c) if isinstance(c, complex) else float(c)


def _solve(rows, rhs, exact):
    if exact:
        sol, _ = linalg.exact_solve(rows, rhs)
        if sol is None:
            raise DomainError("special-solution system is inconsistent")
        return sol
    a = np.array(rows, dtype=complex)
    b = np.array(rhs, dtype=complex)
    sol = np.linalg.lstsq(a, b, rcond=None)[0]
    return [complex(x) if abs(x.imag) > 0 else float(x.real) for x in sol]


# --------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class SolidHarmonicSum:
    """``sum a_{n,m} r^degree Y_n^m`` with ``degree - n`` even and non-negative."""

    degree: int
    coefficients: Mapping

    def __post_init__(self):
        for (n, m) in self.coefficients:
            if abs(m) > n or n > self.degree or (self.degree - n) % 2:
                raise DomainError(f"invalid term (n={n}, m={m}) for degree {self.degree}")

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coefficients.values())

    def to_polynomial(self) -> HomogeneousPolynomial:
        out = HomogeneousPolynomial.zero(3, self.degree)
        r2 = HomogeneousPolynomial.norm_squared(3)
        for (n, m), a in self.coefficients.items():
            if a == 0:
                continue
            term = (r2 ** ((self.degree - n) // 2)) * solid_harmonic_polynomial(n, m)
            out = out + term.to_float() * (complex(a) * harmonic_norm(n, m))
        return out

    def evaluate(self, points):
        return _solid_sum_eval(self.coefficients, self.degree, np.asarray(points, dtype=float))

    @classmethod
    def from_polynomial(cls, p: HomogeneousPolynomial, tol: float = 1e-13) -> "SolidHarmonicSum":
        """Expand a homogeneous polynomial in three variables.

        ``p = sum_l |x|^(2l) H_(kappa-2l)`` by exact harmonic decomposition,
        then each ``H_n`` is projected onto ``Y_n^m`` with a Gauss product
        rule on the sphere (exact for these degrees). Coefficients below
        ``tol`` times the largest are dropped.
        """
        from ..helmholtz_series import harmonic_decompose
        from ..specfun import sphere_quadrature, spherical_harmonic

        if p.dimension != 3:
            raise DomainError("solid-harmonic form needs a polynomial in three variables")
        kappa = p.degree
        nq = kappa + 2
        th, ph, w = sphere_quadrature(nq, 2 * nq + 2)
        pts = (np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th))
        coeffs = {}
        for _, h in harmonic_decompose(p):
            if h.is_zero():
                continue
            n = h.degree
            vals = np.asarray(h.to_float().evaluate(*pts), dtype=complex)
            for m in range(-n, n + 1):
                coeffs[(n, m)] = complex(np.sum(w * vals * np.conj(spherical_harmonic(n, m, th, ph))))
        big = max((abs(a) for a in coeffs.values()), default=0.0)
        coeffs = {k: (a.real if a.imag == 0 else a) for k, a in coeffs.items() if abs(a) > tol * big}
        return cls(kappa, coeffs)


def _solid_sum_eval(coeffs, degree, pts, dtype=np.float64):
    pts = np.asarray(pts, dtype=dtype)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    safe = np.where(r > 0, r, 1)
    t = np.clip(z / safe, -1, 1)
    phi = np.arctan2(y, x)
    nmax = max((n for n, _ in coeffs), default=0)
    table = legendre_table(nmax, t, dtype=dtype)
    out = np.zeros(r.shape, dtype=np.result_type(dtype, np.complex64))
    for (n, m), a in coeffs.items():
        norm = harmonic_norm(n, m)
        y_nm = table[n, abs(m)] * np.exp(1j * m * phi)
        out = out + complex(a) * norm * r ** degree * y_nm
    return out


def zeta(kappa: int, n: int) -> Fraction:
    """``1 / ((kappa+2)(kappa+3) - n(n+1))``; the denominator is positive for ``n <= kappa``."""
    den = (kappa + 2) * (kappa + 3) - n * (n + 1)
    assert den > 0, "zeta denominator must be positive for 0 <= n <= kappa"
    return Fraction(1, den)


def _boundary_value(deg, m, t, bc):
    if bc is BoundaryCondition.DIRICHLET:
        return _kernels.legendre_p(deg, abs(m), t)
    return _kernels.legendre_p_dt(deg, abs(m), t)


def _resonance_scale(deg, m):
    grid = np.linspace(-0.999, 0.999, 401)
    return max(abs(_kernels.legendre_p(deg, abs(m), float(x))) for x in grid)


def special_solution_cone(p: SolidHarmonicSum, geom: ConeGeometry, bc,
                          n_quad: int = 256) -> SpecialSolution:
    """Special solution of ``Lap v = p`` on the cone for ``p`` in solid-harmonic form.

    Each term ``a r^kappa Y_n^m`` gives ``zeta a r^(kappa+2) Y_n^m``, with its
    boundary trace (Dirichlet) or normal derivative (Neumann) removed by a
    multiple of ``r^(kappa+2) Y_(kappa+2)^m``. When ``kappa + 2`` is an
    exponent for order ``m`` that correction is impossible; the term is
    then resonant and the log coefficient
    ``c = int Y_n^m conj(Y_mu^m) / ((2 kappa + 5) int |Y_mu^m|^2)`` over the
    cap is computed with Gauss-Legendre quadrature in ``cos theta``.
    """
    bc = BoundaryCondition.parse(bc)
    if isinstance(p, HomogeneousPolynomial):
        p = SolidHarmonicSum.from_polynomial(p)
    kappa = p.degree
    mu = kappa + 2
    t = math.cos(geom.omega)
    terms: dict = {}
    zetas = {}
    log_terms = []
    for (n, m), a in sorted(p.coefficients.items()):
        if a == 0:
            continue
        z = zeta(kappa, n)
        zetas[n] = z
        za = complex(a) * (z.numerator / z.denominator)
        terms[(n, m)] = terms.get((n, m), 0) + za
        denom = _boundary_value(mu, m, t, bc)
        if abs(denom) <= RESONANCE_TOL * _resonance_scale(mu, m):
            c = cone_log_coefficient(kappa, n, m, geom, n_quad)
            log_terms.append(LogTerm(complex(a) * c, "cone", mu, m, (n, m)))
            continue
        val = harmonic_norm(n, m) * _boundary_value(n, m, t, bc)
        corr = -za * val / (harmonic_norm(mu, m) * denom)
        terms[(mu, m)] = terms.get((mu, m), 0) + corr
    poly = SolidHarmonicSum(mu, terms).to_polynomial() if terms else HomogeneousPolynomial.zero(3, mu)
    return SpecialSolution(poly, log_terms, bool(log_terms), geom, bc, harmonic_terms=terms,
                           zeta=zetas, exact=False, corrector_omitted=bool(log_terms))


def cone_log_coefficient(kappa: int, n: int, m: int, geom: ConeGeometry,
                         n_quad: int = 256) -> complex:
    """Cap-quadrature value of ``int Y_n^m conj(Y_mu^m) / ((2 kappa + 5) int |Y_mu^m|^2)``.

    The azimuthal integrals cancel between numerator and denominator, so
    only the ``theta`` integrals over ``[0, omega]`` are formed.
    """
    mu = kappa + 2
    theta, _, w = cap_quadrature(geom.omega, n_quad, 1)
    tt = np.cos(theta)
    table = legendre_table(max(mu, n), tt)
    yn = harmonic_norm(n, m) * table[n, abs(m)]
    ym = harmonic_norm(mu, m) * table[mu, abs(m)]
    num = float(np.sum(w * yn * ym))
    den = (2 * kappa + 5) * float(np.sum(w * ym * ym))
    return num / den


# --------------------------------------------------------------------------
# verification


@dataclass
class ResidualReport:
    """Residuals of a special solution.

    ``exact_pde`` is True when ``Lap q - p`` is the zero polynomial in exact
    arithmetic (2D exact constructions). The sampled fields are maxima over
    points in the annulus ``0.1 <= r <= 0.9`` inside the domain.
    """

    exact_pde: Optional[bool]
    pde_residual: float
    boundary_residual: float
    trace_residual: float
    normal_residual: float
    samples: int


def _fd_laplacian(fn, pts, h=1e-3):
    ld = np.longdouble
    pts = np.asarray(pts, dtype=ld)
    dim = pts.shape[-1]
    hh = ld(h)
    center = fn(pts)
    acc = -30 * dim * center
    for axis in range(dim):
        e = np.zeros(dim, dtype=ld)
        e[axis] = hh
        acc = acc + 16 * (fn(pts + e) + fn(pts - e)) - (fn(pts + 2 * e) + fn(pts - 2 * e))
    return acc / (12 * hh * hh)


def verify_special_solution(sol: SpecialSolution, p, geom, bc, samples: int = 500) -> ResidualReport:
    """Check ``Lap v = p`` and the boundary condition on sample points.

    For 2D solutions the polynomial part is also checked exactly. The PDE
    residual uses a fourth-order stencil in extended precision. Resonant
    cone solutions are checked only for their polynomial part against
    ``p`` minus the Laplacian of the log term, since the angular corrector
    is not available; their boundary residual is reported as NaN.
    """
    bc = BoundaryCondition.parse(bc)
    rng = np.random.default_rng(12345)
    if isinstance(geom, SectorGeometry):
        return _verify_2d(sol, p, geom, bc, rng, samples)
    return _verify_cone(sol, p, geom, bc, rng, samples)


def _verify_2d(sol, p, geom, bc, rng, samples):
    q = sol.polynomial_part
    exact_pde = None
    if q.is_exact and p.is_exact:
        exact_pde = (q.laplacian() - p).is_zero()
    r = rng.uniform(0.1, 0.9, samples)
    th = rng.uniform(0.05, 0.95, samples) * geom.omega
    pts = np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)
    qf = q.to_float()

    def field(x):
        out = np.asarray(qf.evaluate(x[..., 0], x[..., 1]), dtype=np.clongdouble)
        for term in sol.log_terms:
            out = out + np.clongdouble(term.coefficient) * _sector_log_ld(term, x)
        return out

    lap = _fd_laplacian(field, pts)
    pv = np.asarray(p.to_float().evaluate(pts[:, 0], pts[:, 1]), dtype=complex)
    pde = float(np.max(np.abs(lap - pv)))

    rb = np.linspace(0.1, 0.9, 41)
    trace, normal = 0.0, 0.0
    grad = [g.to_float() for g in qf.gradient()]
    for ang, nvec in ((0.0, (0.0, -1.0)), (geom.omega, (-math.sin(geom.omega), math.cos(geom.omega)))):
        bx, by = rb * math.cos(ang), rb * math.sin(ang)
        v = np.asarray(qf.evaluate(bx, by), dtype=complex)
        dv = nvec[0] * np.asarray(grad[0].evaluate(bx, by), dtype=complex) \
            + nvec[1] * np.asarray(grad[1].evaluate(bx, by), dtype=complex)
        for term in sol.log_terms:
            pts_b = np.stack([bx, by], axis=-1)
            v = v + term.coefficient * _sector_log_value(term, pts_b)
            sign = -1.0 if ang == 0.0 else 1.0
            dv = dv + term.coefficient * sign * _sector_log_dtheta(term, rb, ang) / rb
        trace = max(trace, float(np.max(np.abs(v))))
        normal = max(normal, float(np.max(np.abs(dv))))
    bres = trace if bc is BoundaryCondition.DIRICHLET else normal
    return ResidualReport(exact_pde, pde, bres, trace, normal, samples)


def _sector_log_ld(term, x):
    ld = np.longdouble
    mu = term.exponent
    r = np.hypot(x[..., 0], x[..., 1])
    th = np.mod(np.arctan2(x[..., 1], x[..., 0]), ld(2) * ld(np.pi))
    lr = np.log(r)
    if term.profile == "sector-dirichlet":
        ang = lr * np.sin(mu * th) + th * np.cos(mu * th)
    else:
        ang = lr * np.cos(mu * th) - th * np.sin(mu * th)
    return r ** mu * ang


def _verify_cone(sol, p, geom, bc, rng, samples):
    mu = sol.polynomial_part.degree
    terms = sol.harmonic_terms
    u = rng.uniform(0, 1, samples)
    r = rng.uniform(0.1, 0.9, samples)
    t = 1 - u * (1 - math.cos(geom.omega) * 0.98 - 0.02)
    th = np.arccos(np.clip(t, -1, 1))
    ph = rng.uniform(0, 2 * np.pi, samples)
    pts = np.stack([r * np.sin(th) * np.cos(ph), r * np.sin(th) * np.sin(ph), r * np.cos(th)], -1)

    def field(x):
        return _solid_sum_eval(terms, mu, x, dtype=np.longdouble)

    lap = _fd_laplacian(field, pts)
    target = _solid_sum_eval(p.coefficients, p.degree, pts)
    pde = float(np.max(np.abs(lap - target)))
    if sol.resonant:
        return ResidualReport(None, pde, float("nan"), float("nan"), float("nan"), samples)
    # boundary: theta = omega
    phb = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    rb = np.linspace(0.1, 0.9, 9)
    R, PH = np.meshgrid(rb, phb, indexing="ij")
    tb = math.cos(geom.omega)
    trace = np.zeros(R.shape, dtype=complex)
    dtheta = np.zeros(R.shape, dtype=complex)
    s = math.sin(geom.omega)
    for (n, m), a in terms.items():
        norm = harmonic_norm(n, m)
        ang = np.exp(1j * m * PH)
        trace += complex(a) * norm * R ** mu * _kernels.legendre_p(n, abs(m), tb) * ang
        dtheta += complex(a) * norm * R ** mu * (-s) * _kernels.legendre_p_dt(n, abs(m), tb) * ang
    tr = float(np.max(np.abs(trace)))
    nr = float(np.max(np.abs(dtheta / R)))
    bres = tr if bc is BoundaryCondition.DIRICHLET else nr
    return ResidualReport(None, pde, bres, tr, nr, samples)
