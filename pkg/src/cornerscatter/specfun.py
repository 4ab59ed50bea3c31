"""Legendre functions of real degree, spherical harmonics and H0.

Legendre functions here carry no Condon-Shortley phase::

    P_lam^m(t) = (1 - t^2)^(m/2) d^m/dt^m P_lam(t),

so ``P_1^1(t) = sqrt(1 - t^2)``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import hankel1, roots_legendre

from . import _kernels
from .errors import DomainError

__all__ = [
    "legendre_p", "legendre_p_dt", "legendre_p_dt2", "legendre_p_dlambda",
    "legendre_p_endpoint", "legendre_table", "spherical_harmonic",
    "harmonic_norm", "sphere_quadrature", "cap_quadrature", "wronskian_det",
    "cylinder_hankel0",
]


def _check(order, t):
    if int(order) != order or order < 0:
        raise DomainError(f"order must be a non-negative integer, got {order}")
    if not abs(t) < 1.0:
        raise DomainError(f"argument must satisfy |t| < 1, got {t}")
    return int(order), float(t)


def legendre_p(degree: float, order: int, t: float) -> float:
    """Associated Legendre function of the first kind, ``P_degree^order(t)``.

    Parameters
    ----------
    degree : float
        Real degree. Degrees below -1/2 are reflected to ``-degree - 1``.
    order : int
        Non-negative integer order.
    t : float
        Argument with ``|t| < 1``.

    Raises
    ------
    DomainError
        If ``|t| >= 1`` or the order is invalid.
    ConvergenceError
        If an internal series fails to converge.
    """
    m, t = _check(order, t)
    return _kernels.legendre_p(float(degree), m, t)


def legendre_p_dt(degree: float, order: int, t: float) -> float:
    """Derivative of :func:`legendre_p` with respect to ``t``."""
    m, t = _check(order, t)
    return _kernels.legendre_p_dt(float(degree), m, t)


def legendre_p_dt2(degree: float, order: int, t: float) -> float:
    """Second derivative of :func:`legendre_p` with respect to ``t``."""
    m, t = _check(order, t)
    return _kernels.legendre_p_dt2(float(degree), m, t)


def legendre_p_dlambda(degree: float, order: int, t: float) -> float:
    """Derivative with respect to the degree, by central differences."""
    m, t = _check(order, t)
    step = 1e-6 * max(1.0, abs(degree))
    return (_kernels.legendre_p(degree + step, m, t)
            - _kernels.legendre_p(degree - step, m, t)) / (2.0 * step)


def legendre_p_endpoint(degree: int, order: int, t: float) -> float:
    """Limit of ``P_n^m`` at ``t = +-1`` for integer degree.

    Equals ``(+-1)^n`` for ``m = 0`` and zero otherwise.
    """
    if int(degree) != degree or degree < 0:
        raise DomainError("endpoint values are defined for integer degree only")
    if abs(t) != 1.0:
        raise DomainError("endpoint evaluation needs t = +1 or t = -1")
    if order:
        return 0.0
    return float(t) ** int(degree)


def legendre_table(n_max: int, t, dtype=float) -> np.ndarray:
    """All ``P_n^m(t)`` for ``0 <= m <= n <= n_max`` on an array of ``t``.

    Returns an array of shape ``(n_max + 1, n_max + 1) + t.shape`` indexed
    ``[n, m]``; entries with ``m > n`` are zero. ``dtype`` may be
    ``np.longdouble`` for extended precision evaluation.
    """
    t = np.asarray(t, dtype=dtype)
    out = np.zeros((n_max + 1, n_max + 1) + t.shape, dtype=dtype)
    s = np.sqrt(np.clip((1 - t) * (1 + t), 0, None))
    pmm = np.ones_like(t)
    for m in range(n_max + 1):
        if m:
            pmm = pmm * (2 * m - 1) * s
        out[m, m] = pmm
        if m + 1 <= n_max:
            out[m + 1, m] = (2 * m + 1) * t * pmm
        for n in range(m + 2, n_max + 1):
            out[n, m] = ((2 * n - 1) * t * out[n - 1, m] - (n + m - 1) * out[n - 2, m]) / (n - m)
    return out


def harmonic_norm(n: int, m: int) -> float:
    """Normalization ``sqrt((2n+1)/(4 pi) (n-|m|)!/(n+|m|)!)`` of ``Y_n^m``."""
    m = abs(m)
    return math.sqrt((2 * n + 1) / (4 * math.pi) * math.factorial(n - m) / math.factorial(n + m))


def spherical_harmonic(n: int, m: int, theta, phi):
    """Normalized spherical harmonic ``Y_n^m(theta, phi)``.

    Uses ``P_n^{|m|}`` for both signs of ``m`` so that ``Y_n^{-m}`` is the
    complex conjugate of ``Y_n^m``.
    """
    if int(n) != n or n < 0 or int(m) != m or abs(m) > n:
        raise DomainError(f"invalid spherical harmonic index (n={n}, m={m})")
    n, m = int(n), int(m)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    p = legendre_table(n, np.cos(theta))[n, abs(m)]
    val = harmonic_norm(n, m) * p * np.exp(1j * m * phi)
    return val if val.ndim else complex(val)


def sphere_quadrature(n_theta: int = 64, n_phi: int = 128):
    """Gauss-Legendre in ``cos(theta)`` times the trapezoid rule in ``phi``.

    Returns
    -------
    theta, phi, weight : ndarray
        Flattened node arrays; ``sum(weight * f)`` integrates ``f`` over S^2.
    """
    x, w = roots_legendre(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(np.arccos(x), phi, indexing="ij")
    wt = np.repeat(w[:, None], n_phi, axis=1) * (2 * np.pi / n_phi)
    return th.ravel(), ph.ravel(), wt.ravel()


def cap_quadrature(omega: float, n_theta: int = 256, n_phi: int = 1):
    """Quadrature on the spherical cap ``0 <= theta <= omega``.

    Gauss-Legendre in ``t = cos(theta)`` over ``[cos(omega), 1]``. With the
    default ``n_phi=1`` the azimuthal integral is left to the caller, which
    suits integrands of the form ``f(theta) e^{i m phi}``.
    """
    x, w = roots_legendre(n_theta)
    a = math.cos(omega)
    t = 0.5 * (1 - a) * x + 0.5 * (1 + a)
    wt = 0.5 * (1 - a) * w
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(np.arccos(t), phi, indexing="ij")
    weight = np.repeat(wt[:, None], n_phi, axis=1) * (2 * np.pi / n_phi)
    return th.ravel(), ph.ravel(), weight.ravel()


def wronskian_det(n: int, m: int, t: float) -> float:
    """Determinant ``P_n^m (P_{n-2}^m)' - (P_n^m)' P_{n-2}^m`` at ``t``."""
    if n < 2 or not 0 <= m <= n - 2:
        raise DomainError(f"need n >= 2 and 0 <= m <= n-2, got n={n}, m={m}")
    m, t = _check(m, t)
    a = _kernels.legendre_p(n, m, t)
    b = _kernels.legendre_p(n - 2, m, t)
    da = _kernels.legendre_p_dt(n, m, t)
    db = _kernels.legendre_p_dt(n - 2, m, t)
    return a * db - da * b


def cylinder_hankel0(x):
    """Hankel function of the first kind and order zero, for ``x > 0``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("H0 is singular at x <= 0")
    val = hankel1(0, arr)
    return val if val.ndim else complex(val)
