"""Lippmann-Schwinger volume integral equation on a uniform grid.

The total field satisfies ``Lap u + k^2 q u = 0``. With the outgoing
fundamental solution ``Phi(x) = (i/4) H_0^(1)(k|x|)`` of
``Lap + k^2`` (so that ``(Lap + k^2) Phi = -delta``),

    u = u_in + k^2 int Phi(x - y) (q(y) - 1) u(y) dy.

The integral is discretized cell by cell. The imaginary part of the
kernel, ``J_0/4``, is smooth and sampled at cell centers. The real part is
sampled at centers except in a 5x5 block of neighbours, where its
logarithmic singularity is integrated exactly over the cell and the smooth
remainder is sampled. The discrete operator is a Toeplitz convolution,
applied through a circulant embedding on a doubled grid, and the system is
solved with restarted GMRES on the support of ``q - 1``.
"""
from __future__ import annotations

import logging
import math
import os
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.fft import fft2, ifft2
from scipy.sparse.linalg import LinearOperator, gmres
from scipy.special import hankel1, j0, y0

from ..errors import DomainError, ResolutionError, ResolutionWarning, SolverError
from .contrast import ContrastField
from .incident import IncidentField, incident_values

logger = logging.getLogger(__name__)

__all__ = ["TotalField", "solve", "required_grid_size", "check_resolution", "kernel_matrix",
           "apply_operator", "log_cell_integral", "NEAR_RADIUS", "TARGET_RESIDUAL"]

NEAR_RADIUS = 2
TARGET_RESIDUAL = 1e-8
POINTS_PER_WAVELENGTH = 10
EULER_GAMMA = 0.5772156649015329
# FFT worker threads; the only environment knob
FFT_WORKERS = int(os.environ.get("CORNERSCATTER_THREADS", "1") or 1)


@dataclass
class TotalField:
    """Solution of the volume integral equation on the contrast grid.

    Attributes
    ----------
    u, incident : ndarray, shape (N, N)
        Total and incident field at cell centers, ``[iy, ix]``.
    residual : float
        ``||u - u_in - K (q-1) u|| / ||u_in||`` over the whole grid.
    density : ndarray
        ``k^2 A (q - 1) u`` per cell, the quantity the far field integrates.
    """

    contrast: ContrastField
    k: float
    u: np.ndarray
    incident: np.ndarray
    residual: float
    iterations: int
    residual_history: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def scattered(self) -> np.ndarray:
        return self.u - self.incident

    @property
    def density(self) -> np.ndarray:
        c = self.contrast
        return self.k ** 2 * c.cell_area * (c.q - 1) * self.u


# --------------------------------------------------------------------------
# kernel


def _log_primitive(x, y):
    # d^2 F / dx dy = ln sqrt(x^2 + y^2)
    r2 = x * x + y * y
    safe_r2 = np.where(r2 > 0, r2, 1.0)
    t1 = np.where(r2 > 0, x * y * (np.log(safe_r2) - 3), 0.0)
    t2 = np.where(x != 0, x * x * np.arctan(y / np.where(x != 0, x, 1.0)), 0.0)
    t3 = np.where(y != 0, y * y * np.arctan(x / np.where(y != 0, y, 1.0)), 0.0)
    return 0.5 * (t1 + t2 + t3)


def log_cell_integral(x0, x1, y0, y1):
    """``int_x0^x1 int_y0^y1 ln sqrt(x^2 + y^2) dy dx`` in closed form."""
    F = _log_primitive
    return F(x1, y1) - F(x0, y1) - F(x1, y0) + F(x0, y0)


def _smooth_remainder(k, rho):
    # Re Phi + ln(rho) / (2 pi), continuous at 0
    rho = np.asarray(rho, dtype=float)
    safe = np.where(rho > 0, rho, 1.0)
    val = -0.25 * y0(k * safe) + np.log(safe) / (2 * math.pi)
    at_zero = -(math.log(k / 2) + EULER_GAMMA) / (2 * math.pi)
    return np.where(rho > 0, val, at_zero)


@lru_cache(maxsize=16)
def _kernel_fft(k: float, n: int, h: float):
    off = np.arange(2 * n)
    off = np.where(off < n, off, off - 2 * n).astype(float)
    OX, OY = np.meshgrid(off, off, indexing="xy")
    rho = h * np.hypot(OX, OY)
    with np.errstate(all="ignore"):
        g = 0.25j * hankel1(0, k * np.where(rho > 0, rho, 1.0))
    near = (np.abs(OX) <= NEAR_RADIUS) & (np.abs(OY) <= NEAR_RADIUS)
    ox, oy = OX[near] * h, OY[near] * h
    avg_log = log_cell_integral(ox - h / 2, ox + h / 2, oy - h / 2, oy + h / 2) / (h * h)
    real_near = -avg_log / (2 * math.pi) + _smooth_remainder(k, rho[near])
    g[near] = real_near + 0.25j * j0(k * rho[near])
    # offset -n is never a difference of two grid indices
    g[n, :] = 0
    g[:, n] = 0
    return fft2(g)


def kernel_matrix(k: float, n: int, h: float) -> np.ndarray:
    """The embedded kernel on the doubled grid (for inspection and tests)."""
    return ifft2(_kernel_fft(float(k), int(n), float(h)))


def apply_operator(k: float, contrast: ContrastField, v: np.ndarray) -> np.ndarray:
    """``k^2 A sum_j G(x_i - x_j) (q_j - 1) v_j`` for every cell ``i``."""
    n, h = contrast.n, contrast.h
    kf = _kernel_fft(float(k), n, float(h))
    pad = np.zeros((2 * n, 2 * n), dtype=complex)
    pad[:n, :n] = (contrast.q - 1) * v
    conv = ifft2(kf * fft2(pad, workers=FFT_WORKERS), workers=FFT_WORKERS)[:n, :n]
    return k ** 2 * h * h * conv


# --------------------------------------------------------------------------
# resolution


def required_grid_size(contrast: ContrastField, k: float) -> int:
    """``N`` giving ten cells per interior wavelength across the box."""
    index = math.sqrt(max(contrast.max_index(), 1.0))
    return int(math.ceil(POINTS_PER_WAVELENGTH * 2 * contrast.half_width * k * index / (2 * math.pi)))


def check_resolution(contrast: ContrastField, k: float, strict: bool = False) -> bool:
    """Warn (or raise with ``strict``) when the grid under-resolves the wavelength."""
    need = required_grid_size(contrast, k)
    if contrast.n >= need:
        return True
    msg = f"grid N={contrast.n} is below the resolution threshold N>={need} at k={k:g}"
    if strict:
        raise ResolutionError(msg)
    warnings.warn(msg, ResolutionWarning, stacklevel=3)
    return False


# --------------------------------------------------------------------------
# solve


def solve(contrast: ContrastField, k: float, inc: IncidentField, *, tol: float = 1e-10,
          restart: int = 80, maxiter: int = 2000, strict_resolution: bool = False) -> TotalField:
    """Solve for the total field.

    Parameters
    ----------
    contrast : ContrastField
    k : float
        Wavenumber, positive.
    inc : IncidentField
        For point sources the source must lie outside the support.
    tol : float
        GMRES relative tolerance on the support system. The returned
        ``residual`` is recomputed on the whole grid and must be at most
        ``TARGET_RESIDUAL``; otherwise ``SolverError`` is raised.

    Raises
    ------
    SolverError
        GMRES did not reach the residual target.
    ResolutionError
        With ``strict_resolution`` and an under-resolved grid.
    """
    if not k > 0:
        raise DomainError("wavenumber must be positive")
    t0 = time.perf_counter()
    check_resolution(contrast, k, strict=strict_resolution)
    c = contrast.centers
    X, Y = np.meshgrid(c, c, indexing="xy")
    if inc.kind == "point" and contrast.value_at(*inc.source) != 1:
        raise DomainError("point source lies inside the scatterer")
    uin = incident_values(inc, k, X, Y)
    support = contrast.support
    if not np.any(support):
        return TotalField(contrast, k, uin.copy(), uin, 0.0, 0, [], time.perf_counter() - t0)

    idx = np.nonzero(support.ravel())[0]
    n = contrast.n

    def matvec(v):
        full = np.zeros(n * n, dtype=complex)
        full[idx] = v
        kv = apply_operator(k, contrast, full.reshape(n, n)).ravel()
        return v - kv[idx]

    op = LinearOperator((idx.size, idx.size), matvec=matvec, dtype=complex)
    rhs = uin.ravel()[idx]
    history: list = []
    sol, info = gmres(op, rhs, x0=rhs.copy(), rtol=tol, atol=0.0, restart=restart,
                      maxiter=maxiter, callback=history.append, callback_type="pr_norm")
    full = np.zeros(n * n, dtype=complex)
    full[idx] = sol
    u = uin + apply_operator(k, contrast, full.reshape(n, n))
    res = np.linalg.norm(u - uin - apply_operator(k, contrast, u)) / np.linalg.norm(uin)
    elapsed = time.perf_counter() - t0
    logger.info("LS solve N=%d k=%g: %d GMRES steps, residual %.2e, %.2fs",
                n, k, len(history), res, elapsed)
    if info != 0 or not res <= TARGET_RESIDUAL:
        raise SolverError(f"GMRES stopped with residual {res:.3e} after {len(history)} steps "
                          f"(history tail {history[-5:]})")
    return TotalField(contrast, k, u, uin, float(res), len(history), history, elapsed)
