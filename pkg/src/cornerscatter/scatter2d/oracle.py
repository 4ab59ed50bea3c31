"""Separation-of-variables solution for a homogeneous disk.

Inside the disk ``u = sum c_n J_n(kappa r) e^{i n theta}`` with
``kappa = k sqrt(q0)``; outside ``u = sum (b_n J_n(k r) + a_n H_n(k r)) e^{i n theta}``.
Continuity of ``u`` and ``d_r u`` at ``r = R`` gives a 2x2 system per mode.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import h1vp, hankel1, jv, jvp

from ..errors import ConvergenceError, DomainError
from .farfield import FarFieldPattern, uniform_angles
from .incident import IncidentField

__all__ = ["DiskOracle", "disk_oracle", "incident_coefficients", "mode_determinant",
           "transmission_eigenvalues", "default_mode_count"]

SINGULAR_TOL = 1e-13


def default_mode_count(k: float, radius: float, q0: complex) -> int:
    x = k * radius * math.sqrt(max(abs(q0), 1.0))
    return int(math.ceil(x + 4 * x ** (1 / 3))) + 12


def incident_coefficients(inc: IncidentField, k: float, n_max: int) -> dict:
    """``b_n`` with ``u_in = sum b_n J_n(k r) e^{i n theta}`` around the origin."""
    ns = range(-n_max, n_max + 1)
    if inc.kind == "plane":
        a = inc.angle
        return {n: (1j) ** n * cmath.exp(-1j * n * a) for n in ns}
    if inc.kind == "herglotz":
        g = np.asarray(inc.density, dtype=complex)
        m = g.size
        ang = uniform_angles(m)
        return {n: (1j) ** n * (2 * math.pi / m) * complex(np.sum(g * np.exp(-1j * n * ang)))
                for n in ns}
    raise DomainError("the disk oracle supports plane and Herglotz incidence")


@dataclass(frozen=True)
class DiskOracle:
    """Mode coefficients for a disk centred at the origin.

    ``scattering[n] = a_n``, ``interior[n] = c_n``, ``incident[n] = b_n``.
    """

    radius: float
    q0: complex
    k: float
    incident: dict
    scattering: dict
    interior: dict

    def far_field_at(self, angles) -> np.ndarray:
        """``u_inf(theta) = sqrt(2/(pi k)) e^{-i pi/4} sum a_n (-i)^n e^{i n theta}``."""
        th = np.atleast_1d(np.asarray(angles, dtype=float))
        out = np.zeros(th.shape, dtype=complex)
        for n, a in self.scattering.items():
            out += a * (-1j) ** n * np.exp(1j * n * th)
        return math.sqrt(2 / (math.pi * self.k)) * cmath.exp(-0.25j * math.pi) * out

    def far_field(self, m: int = 256) -> FarFieldPattern:
        return FarFieldPattern.from_values(self.k, self.far_field_at(uniform_angles(m)))

    def total_field(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        th = np.arctan2(y, x)
        kappa = self.k * np.sqrt(complex(self.q0))
        inside = r < self.radius
        out = np.zeros(r.shape, dtype=complex)
        safe = np.where(inside, self.radius, r)
        for n in self.scattering:
            e = np.exp(1j * n * th)
            out += np.where(inside, self.interior[n] * jv(n, kappa * r),
                            self.incident[n] * jv(n, self.k * r)
                            + self.scattering[n] * hankel1(n, self.k * safe)) * e
        return out


def disk_oracle(radius: float, q0: complex, k: float, inc, n_max: int | None = None) -> DiskOracle:
    """Mode-matching solution.

    Parameters
    ----------
    radius, q0, k : float
        ``q0 > 0`` (complex values with non-negative imaginary part are
        accepted too).
    inc : IncidentField or float
        A float is read as a plane-wave direction angle.

    Raises
    ------
    ConvergenceError
        When a 2x2 mode system is numerically singular; the message names
        the mode.
    """
    from .incident import plane_wave

    if radius <= 0 or k <= 0:
        raise DomainError("radius and k must be positive")
    q0 = complex(q0)
    if q0.real <= 0 or q0.imag < 0:
        raise DomainError("q0 must have positive real part and non-negative imaginary part")
    if not isinstance(inc, IncidentField):
        inc = plane_wave(float(inc))
    n_max = default_mode_count(k, radius, q0) if n_max is None else n_max
    b = incident_coefficients(inc, k, n_max)
    kappa = k * cmath.sqrt(q0)
    kr, kar = k * radius, kappa * radius
    a, c = {}, {}
    for n in range(-n_max, n_max + 1):
        if b[n] == 0:
            a[n], c[n] = 0j, 0j
            continue
        jk, djk = jv(n, kr), jvp(n, kr)
        hk, dhk = hankel1(n, kr), h1vp(n, kr)
        jq, djq = jv(n, kar), jvp(n, kar)
        t1, t2 = k * dhk * jq, kappa * djq * hk
        den = t1 - t2
        if abs(den) <= SINGULAR_TOL * (abs(t1) + abs(t2)):
            raise ConvergenceError(f"mode-matching system is singular at mode n={n}")
        a[n] = complex(b[n] * (kappa * djq * jk - k * djk * jq) / den)
        # Wronskian J_n H_n' - J_n' H_n = 2i / (pi k R)
        c[n] = complex(b[n] * (2j / (math.pi * radius)) / den)
    return DiskOracle(float(radius), q0, float(k), b, a, c)


def mode_determinant(n: int, radius: float, q0: float, k: float) -> float:
    """``kappa J_n'(kappa R) J_n(kR) - k J_n'(kR) J_n(kappa R)``.

    Zeros are the wavenumbers where mode ``n`` does not scatter, i.e. the
    interior transmission eigenvalues carried by that mode.
    """
    kappa = k * math.sqrt(q0)
    return float(kappa * jvp(n, kappa * radius) * jv(n, k * radius)
                 - k * jvp(n, k * radius) * jv(n, kappa * radius))


def transmission_eigenvalues(n: int, radius: float, q0: float, k_min: float, k_max: float,
                             samples: int = 2000) -> list[float]:
    """Roots of :func:`mode_determinant` in ``[k_min, k_max]`` by scan and bisection."""
    ks = np.linspace(k_min, k_max, samples)
    vals = [mode_determinant(n, radius, q0, k) for k in ks]
    roots = []
    for i in range(samples - 1):
        if vals[i] == 0:
            roots.append(float(ks[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(lambda k: mode_determinant(n, radius, q0, k), ks[i], ks[i + 1],
                                xtol=1e-13))
    return roots
