"""Jumps of normal derivatives across an interface, by one-sided differences."""
from __future__ import annotations

import numpy as np

from ..errors import DomainError

__all__ = ["fornberg_weights", "normal_derivatives", "transmission_residual", "sample_normal_lines"]


def fornberg_weights(x0: float, nodes, order: int) -> np.ndarray:
    """Finite-difference weights for derivatives ``0..order`` at ``x0``.

    Fornberg's recursion; returns an array of shape ``(order + 1, len(nodes))``.
    """
    x = np.asarray(nodes, dtype=float)
    n = x.size
    c = np.zeros((order + 1, n))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[s, i] = c1 * (s * c[s - 1, i - 1] - c5 * c[s, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for s in range(mn, 0, -1):
                c[s, j] = (c4 * c[s, j] - s * c[s - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def normal_derivatives(samples, step: float, orders, side: int = 1) -> dict:
    """One-sided derivatives along the normal at offset 0.

    ``samples[..., j]`` is the field at ``side * j * step`` along the
    normal, ``j = 0 .. P-1``. Derivatives are with respect to the signed
    normal coordinate.
    """
    s = np.asarray(samples)
    p = s.shape[-1]
    orders = list(orders)
    top = max(orders)
    if top >= p:
        raise DomainError(f"order {top} needs more than {p} samples per normal line")
    w = fornberg_weights(0.0, side * step * np.arange(p), top)
    return {j: s @ w[j] for j in orders}


def transmission_residual(u_outer, u_inner, step: float, orders=(0, 1)) -> dict:
    """``max |d_nu^j (u_outer - u_inner)|`` on the interface for each order.

    Parameters
    ----------
    u_outer : array_like, shape (n_arc, P)
        Samples at ``b + j h nu`` (the side ``nu`` points into).
    u_inner : array_like, shape (n_arc, P)
        Samples at ``b - j h nu``.
    step : float
        ``h``.
    """
    outer = normal_derivatives(u_outer, step, orders, side=1)
    inner = normal_derivatives(u_inner, step, orders, side=-1)
    return {j: float(np.max(np.abs(outer[j] - inner[j]))) for j in orders}


def sample_normal_lines(fn, points, normals, step: float, count: int, side: int = 1) -> np.ndarray:
    """Evaluate ``fn(x, y)`` at ``points + side * j * step * normals`` for ``j < count``."""
    pts = np.asarray(points, dtype=float)
    nv = np.asarray(normals, dtype=float)
    j = np.arange(count)
    x = pts[:, 0, None] + side * step * j[None, :] * nv[:, 0, None]
    y = pts[:, 1, None] + side * step * j[None, :] * nv[:, 1, None]
    return np.asarray(fn(x, y))
