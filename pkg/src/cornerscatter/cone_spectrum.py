"""Singular exponents of the Laplacian on sectors and circular cones.

An exponent ``lam`` is a power for which ``r^lam V`` solves the homogeneous
Laplace problem on the infinite sector or cone, with ``V`` an angular
eigenfunction. For sectors these are ``j*pi/omega``. For cones they are
roots in ``lam`` of ``P_lam^{|m|}(cos omega)`` (Dirichlet) or of its
derivative in the argument (Neumann), over all orders ``m``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import ConvergenceError, DomainError
from .geometry import BoundaryCondition, ConeGeometry, SectorGeometry

logger = logging.getLogger(__name__)

Geometry = Union[SectorGeometry, ConeGeometry]

SCAN_STEP = 0.05
# tighter than the 1e-12 scan target: at high orders |P| grows by ~1e3 per unit
# degree, and the unnormalized root residual must stay below 1e-10
ROOT_XTOL = 1e-14
MERGE_TOL = 1e-9
MEMBER_TOL = 1e-9

__all__ = [
    "SingularExponent", "AngularEigenfunction", "sector_exponents", "cone_exponents",
    "eigenfunctions", "no_exponent_equals_one", "sobolev_isomorphism",
    "holder_isomorphism", "asymptotic_terms", "admissible_alpha",
]


@dataclass(frozen=True)
class SingularExponent:
    """One exponent of the Dirichlet or Neumann spectrum.

    Attributes
    ----------
    value : float
        The exponent ``lam``.
    boundary_condition : BoundaryCondition
    index : int
        Harmonic index ``j`` for sectors; smallest contributing order ``|m|``
        for cones.
    multiplicity : int
        Number of independent real eigenfunctions. For cones each order
        ``m >= 1`` contributes two (``e^{+-i m phi}``).
    orders : tuple of int
        Cone orders ``|m|`` at which the root was found. Empty for sectors.
    residual : float
        Root residual normalized by the scan magnitude of the function.
    raw_residual : float
        Unnormalized ``|P|`` (or ``|P'|``) at the root.
    merged : bool
        True when roots from several orders were merged into this entry.
    """

    value: float
    boundary_condition: BoundaryCondition
    index: int
    multiplicity: int
    orders: tuple = ()
    residual: float = 0.0
    raw_residual: float = 0.0
    merged: bool = False
    dimension: int = 2


def _harmonic_indices(geom: SectorGeometry, bc, lam_max):
    jmax = int(math.floor(lam_max * geom.omega / math.pi)) + 1
    for j in range(-jmax, jmax + 1):
        if j == 0 and bc is BoundaryCondition.DIRICHLET:
            continue
        yield j


def _sector_value(geom: SectorGeometry, j: int) -> float:
    if geom.pi_fraction is not None:
        return float(j / geom.pi_fraction)
    return j * math.pi / geom.omega


def sector_exponents(geom: SectorGeometry, bc, lam_max: float) -> list[SingularExponent]:
    """Exponents ``j*pi/omega`` in ``(-lam_max, lam_max]``, ascending.

    ``j`` ranges over the nonzero integers for Dirichlet conditions and over
    all integers for Neumann conditions.
    """
    if not isinstance(geom, SectorGeometry):
        raise DomainError("sector_exponents needs a SectorGeometry")
    bc = BoundaryCondition.parse(bc)
    if lam_max <= 0:
        raise DomainError("lam_max must be positive")
    out = []
    for j in _harmonic_indices(geom, bc, lam_max):
        val = _sector_value(geom, j)
        if -lam_max < val <= lam_max + 1e-12:
            out.append(SingularExponent(val, bc, j, 1))
    return sorted(out, key=lambda e: e.value)


def _order_scale(lam: float, m: int) -> float:
    # prod_{j<m} (lam - j)(lam + j + 1); zero at the integer degrees below m
    out = 1.0
    for j in range(m):
        out *= (lam - j) * (lam + j + 1.0)
    return out


def _cone_function(bc, m: int, t: float):
    raw = _kernels.legendre_p if bc is BoundaryCondition.DIRICHLET else _kernels.legendre_p_dt

    def f(lam):
        if not m:
            return raw(lam, m, t)
        # divide out the factor that vanishes identically at integers < m
        scale = _order_scale(lam, m)
        if scale == 0.0:
            eps = 1e-7
            return 0.5 * (f(lam - eps) + f(lam + eps))
        return raw(lam, m, t) / scale

    return f, raw


def _scan_nodes(m: int, lam_max: float) -> np.ndarray:
    count = int(math.floor((lam_max + 0.5) / SCAN_STEP)) + 1
    nodes = -0.5 + np.arange(count) / 20.0
    if m:
        # half-step offset keeps nodes off the integers below the order
        nodes = np.concatenate(([-0.5], nodes[:-1] + 0.5 * SCAN_STEP))
    if nodes[-1] < lam_max:
        nodes = np.append(nodes, lam_max)
    return nodes


def _roots_for_order(geom: ConeGeometry, bc, m: int, lam_max: float):
    t = math.cos(geom.omega)
    f, raw = _cone_function(bc, m, t)
    nodes = _scan_nodes(m, lam_max)
    vals = np.array([f(x) for x in nodes])
    found = []
    for i in range(len(nodes) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            root = nodes[i]
        elif a * b < 0.0:
            try:
                root = brentq(f, nodes[i], nodes[i + 1], xtol=ROOT_XTOL, maxiter=200)
            except (RuntimeError, ValueError) as exc:
                raise ConvergenceError(
                    f"root refinement failed for order {m} on "
                    f"[{nodes[i]}, {nodes[i + 1]}]: {exc}") from exc
        else:
            continue
        if root <= -0.5:
            continue
        root = float(root)
        scale = max(abs(a), abs(b), 1e-300)
        found.append((root, float(abs(f(root)) / scale), float(abs(raw(root, m, t))),
                      (nodes[i], nodes[i + 1], a, b)))
    if vals[-1] == 0.0 and nodes[-1] > -0.5:
        found.append((float(nodes[-1]), 0.0, 0.0, (nodes[-1], nodes[-1], 0.0, 0.0)))
    return found


def cone_exponents(geom: ConeGeometry, bc, lam_max: float,
                   orders=None) -> list[SingularExponent]:
    """Dirichlet or Neumann exponents of the circular cone, ascending.

    Roots in ``(-1/2, lam_max]`` are bracketed by a scan of step 0.05 and
    refined with Brent's method; their reflections ``-lam - 1`` fill the
    range below ``-1/2``.

    Parameters
    ----------
    geom : ConeGeometry
    bc : BoundaryCondition or str
    lam_max : float
        Upper end of the scan window.
    orders : iterable of int, optional
        Restrict to these orders ``|m|``. By default orders are added until
        one beyond ``lam_max + 2`` shows no root in the window.

    Notes
    -----
    Equal roots coming from several orders are merged into one exponent
    whose multiplicity is the sum of 1 for ``m = 0`` and 2 for each
    ``m >= 1``; such entries have ``merged=True``.
    """
    if not isinstance(geom, ConeGeometry):
        raise DomainError("cone_exponents needs a ConeGeometry")
    bc = BoundaryCondition.parse(bc)
    if lam_max <= 0:
        raise DomainError("lam_max must be positive")
    raw_roots = []
    if orders is not None:
        order_iter = [int(abs(m)) for m in orders]
    else:
        order_iter = None
    m = 0
    while True:
        if order_iter is not None:
            if m >= len(order_iter):
                break
            order = order_iter[m]
        else:
            order = m
        found = _roots_for_order(geom, bc, order, lam_max)
        for root, res, raw_res, _ in found:
            raw_roots.append((root, order, res, raw_res))
        m += 1
        if order_iter is None and order > lam_max + 2 and not found:
            break
        if m > 10000:  # pragma: no cover - defensive
            raise ConvergenceError("order cap not reached")
    if bc is BoundaryCondition.NEUMANN and (orders is None or 0 in order_iter):
        if not any(abs(r[0]) < MERGE_TOL and r[1] == 0 for r in raw_roots):
            raw_roots.append((0.0, 0, 0.0, 0.0))

    raw_roots.sort()
    merged: list[list] = []
    for root, order, res, raw_res in raw_roots:
        if merged and abs(root - merged[-1][0]) <= MERGE_TOL:
            merged[-1][1].append(order)
            merged[-1][2] = max(merged[-1][2], res)
            merged[-1][3] = max(merged[-1][3], raw_res)
        else:
            merged.append([root, [order], res, raw_res])

    out = []
    for root, ords, res, raw_res in merged:
        mult = sum(1 if o == 0 else 2 for o in ords)
        ords = tuple(sorted(ords))
        kw = dict(boundary_condition=bc, index=ords[0], multiplicity=mult, orders=ords,
                  residual=res, raw_residual=raw_res, merged=len(ords) > 1, dimension=3)
        out.append(SingularExponent(value=root, **kw))
        if root > -0.5 + MERGE_TOL:
            out.append(SingularExponent(value=-root - 1.0, **kw))
    return sorted(out, key=lambda e: e.value)


# --------------------------------------------------------------------------
# eigenfunctions


@dataclass(frozen=True)
class AngularEigenfunction:
    """Angular factor ``V`` of a singular solution ``r^lam V``.

    Sectors: ``sin(lam theta)`` (Dirichlet) or ``cos(lam theta)`` (Neumann).
    Cones: ``P_lam^{|m|}(cos theta) e^{i m phi}``, left unnormalized.
    """

    exponent: SingularExponent
    omega: float
    order: int = 0
    _unused: tuple = field(default=(), repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return self.exponent.dimension

    def profile(self, theta):
        """The theta-dependent factor."""
        lam = self.exponent.value
        theta = np.asarray(theta, dtype=float)
        if self.dimension == 2:
            if self.exponent.boundary_condition is BoundaryCondition.DIRICHLET:
                return np.sin(lam * theta)
            return np.cos(lam * theta)
        t = np.cos(theta)
        m = abs(self.order)
        return np.vectorize(lambda x: _kernels.legendre_p(lam, m, float(x)))(t)

    def profile_dtheta(self, theta):
        lam = self.exponent.value
        theta = np.asarray(theta, dtype=float)
        if self.dimension == 2:
            if self.exponent.boundary_condition is BoundaryCondition.DIRICHLET:
                return lam * np.cos(lam * theta)
            return -lam * np.sin(lam * theta)
        m = abs(self.order)
        return np.vectorize(
            lambda th: -math.sin(th) * _kernels.legendre_p_dt(lam, m, math.cos(th)))(theta)

    def __call__(self, theta, phi=None):
        vals = self.profile(theta)
        if self.dimension == 3:
            phi = 0.0 if phi is None else np.asarray(phi, dtype=float)
            return vals * np.exp(1j * self.order * phi)
        return vals

    def beltrami_residual(self, n_theta: int = 50, n_phi: int = 50, step: float = 1e-3) -> float:
        """Relative residual of ``Lap_S V + lam(lam+1) V = 0`` (``V'' + lam^2 V`` in 2D).

        Theta derivatives use a fourth-order five-point stencil; the phi
        dependence ``e^{i m phi}`` is differentiated exactly.
        """
        lam = self.exponent.value
        lo, hi = 2 * step + 1e-2 * self.omega, self.omega - 2 * step
        theta = np.linspace(lo, hi, n_theta)
        f = {k: self.profile(theta + k * step) for k in (-2, -1, 0, 1, 2)}
        d1 = (f[-2] - 8 * f[-1] + 8 * f[1] - f[2]) / (12 * step)
        d2 = (-f[-2] + 16 * f[-1] - 30 * f[0] + 16 * f[1] - f[2]) / (12 * step ** 2)
        v = f[0]
        if self.dimension == 2:
            res = d2 + lam ** 2 * v
            scale = max(lam ** 2, 1.0) * np.max(np.abs(v))
        else:
            phi = np.linspace(0, 2 * np.pi, n_phi, endpoint=False)
            s = np.sin(theta)
            radial = d2 + np.cos(theta) / s * d1 - self.order ** 2 / s ** 2 * v
            res = (radial + lam * (lam + 1) * v)[:, None] * np.exp(1j * self.order * phi)[None, :]
            scale = max(abs(lam * (lam + 1)), self.order ** 2, 1.0) * np.max(np.abs(v))
        return float(np.max(np.abs(res)) / max(scale, 1e-300))

    def boundary_residual(self) -> float:
        """Relative size of the boundary value (Dirichlet) or normal derivative (Neumann)."""
        lam = self.exponent.value
        sample = np.linspace(0, self.omega, 200)[1:]
        scale = float(np.max(np.abs(self.profile(sample))))
        if self.exponent.boundary_condition is BoundaryCondition.DIRICHLET:
            val = float(np.abs(self.profile(self.omega)))
        else:
            val = float(np.abs(self.profile_dtheta(self.omega))) / max(abs(lam), 1.0)
        return val / max(scale, 1e-300)


def eigenfunctions(exponent: SingularExponent, geom: Geometry) -> list[AngularEigenfunction]:
    """Angular eigenfunctions belonging to an exponent (both signs of ``m`` for cones)."""
    if exponent.dimension == 2:
        return [AngularEigenfunction(exponent, geom.omega)]
    out = []
    for m in exponent.orders:
        out.append(AngularEigenfunction(exponent, geom.omega, m))
        if m:
            out.append(AngularEigenfunction(exponent, geom.omega, -m))
    return out


# --------------------------------------------------------------------------
# solvability predicates


def no_exponent_equals_one(geom: ConeGeometry) -> bool:
    """Check that ``cos w``, ``sin w`` and ``-cos w / sin w`` are all nonzero.

    These are the values at ``t = cos w`` of ``P_1``, ``P_1^1`` and
    ``(P_1^1)'``; when all are nonzero, ``lam = 1`` is neither a Dirichlet nor
    a Neumann exponent of the cone.
    """
    c, s = math.cos(geom.omega), math.sin(geom.omega)
    tol = 1e-12
    return abs(c) > tol and abs(s) > tol and abs(c / s) > tol


def _hits_sector_spectrum(geom: SectorGeometry, bc, value: float) -> bool:
    x = value * geom.omega / math.pi
    j = round(x)
    if abs(x - j) > 1e-12 * max(1.0, abs(x)):
        return False
    return not (j == 0 and bc is BoundaryCondition.DIRICHLET)


def _hits_cone_spectrum(geom: ConeGeometry, bc, value: float) -> bool:
    lam_max = abs(value) + 1.0
    return any(abs(e.value - value) <= MEMBER_TOL for e in cone_exponents(geom, bc, lam_max))


def _hits_spectrum(geom, bc, value):
    bc = BoundaryCondition.parse(bc)
    if isinstance(geom, SectorGeometry):
        return _hits_sector_spectrum(geom, bc, value)
    return _hits_cone_spectrum(geom, bc, value)


def sobolev_isomorphism(geom: Geometry, bc, beta: float) -> bool:
    """Whether the weighted Sobolev problem with weight ``beta`` is an isomorphism.

    Sectors need ``1 - beta`` off the spectrum, cones ``1/2 - beta``.
    """
    shift = 1.0 if isinstance(geom, SectorGeometry) else 0.5
    return not _hits_spectrum(geom, bc, shift - beta)


def holder_isomorphism(geom: Geometry, bc, beta: float, alpha: float) -> bool:
    """Whether the weighted Hoelder problem is an isomorphism: ``2 + alpha - beta`` off the spectrum."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    return not _hits_spectrum(geom, bc, 2.0 + alpha - beta)


def asymptotic_terms(geom: Geometry, bc, gamma: float, gamma1: float, alpha: float):
    """Exponents in ``(2 + alpha - gamma, 2 + alpha - gamma1)`` with their eigenfunctions.

    These are the singular terms ``C r^lam V`` separating solutions in two
    weighted Hoelder spaces.

    Returns
    -------
    list of (SingularExponent, list of AngularEigenfunction)
    """
    bc = BoundaryCondition.parse(bc)
    if not gamma1 < gamma <= 2.0:
        raise DomainError("need gamma1 < gamma <= 2")
    for g in (gamma, gamma1):
        if not holder_isomorphism(geom, bc, g, alpha):
            raise DomainError(f"weight {g} hits the spectrum")
    lo, hi = 2.0 + alpha - gamma, 2.0 + alpha - gamma1
    if isinstance(geom, SectorGeometry):
        spectrum = [e for e in sector_exponents(geom, bc, hi + 1.0) if e.index >= 0]
    else:
        spectrum = cone_exponents(geom, bc, hi + 1.0)
    return [(e, eigenfunctions(e, geom)) for e in spectrum if lo < e.value < hi]


def admissible_alpha(geom: Geometry, bc, alpha: float) -> float:
    """Shrink ``alpha`` below half the gap between 2 and the next exponent above 2."""
    bc = BoundaryCondition.parse(bc)
    if isinstance(geom, SectorGeometry):
        spectrum = sector_exponents(geom, bc, 4.0)
    else:
        spectrum = cone_exponents(geom, bc, 4.0)
    above = [e.value for e in spectrum if e.value > 2.0 + MEMBER_TOL]
    if not above:
        return alpha
    return min(alpha, 0.5 * (min(above) - 2.0))
