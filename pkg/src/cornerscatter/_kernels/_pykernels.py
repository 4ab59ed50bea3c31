"""Pure-Python implementations of the hot numerical kernels.

Used when the compiled extension is unavailable or when the environment
variable ``CORNERSCATTER_PURE_PYTHON`` is set. ``_ckernels.pyx`` mirrors
every function here with the same algorithm.
"""
import math

import numpy as np
from scipy.special import psi, rgamma

from ..errors import ConvergenceError

EULER_GAMMA = 0.57721566490153286061
SERIES_RTOL = 1e-15
MAX_TERMS = 20000
INTEGER_SNAP = 1e-18


def _hyp2f1_direct(a, b, c, z):
    # Plain Gauss series, used for 0 <= z <= 1/2.
    term = 1.0
    total = 1.0
    k = 0
    while True:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        k += 1
        if abs(term) <= SERIES_RTOL * abs(total) and k > abs(a) + abs(b):
            return total
        if k > MAX_TERMS:
            raise ConvergenceError(
                f"hypergeometric series did not converge (a={a}, b={b}, z={z})")


def _hyp2f1_log(a, b, m, w):
    """2F1(a, b; a+b-m; 1-w) for integer m >= 0 and small w.

    Log-aware connection formula valid when c - a - b = -m.
    """
    c = a + b - m
    total = 0.0
    if m > 0:
        # finite part: Gamma(m) Gamma(c) / (Gamma(a) Gamma(b)) w^-m sum_{k<m}
        coef = math.factorial(m - 1) * math.gamma(c) * rgamma(a) * rgamma(b)
        term = 1.0
        part = 1.0
        for k in range(m - 1):
            term *= (a - m + k) * (b - m + k) / ((k + 1.0) * (1.0 - m + k)) * w
            part += term
        total += coef * part * w ** (-m)
    pref = (-1.0) ** m * math.gamma(c) * rgamma(a - m) * rgamma(b - m)
    if pref == 0.0:
        return total
    logw = math.log(w)
    psi_k1 = -EULER_GAMMA
    psi_km1 = -EULER_GAMMA + sum(1.0 / j for j in range(1, m + 1))
    psi_a = float(psi(a))
    psi_b = float(psi(b))
    term = 1.0 / math.factorial(m)
    acc = 0.0
    k = 0
    while True:
        contrib = term * (logw - psi_k1 - psi_km1 + psi_a + psi_b)
        acc += contrib
        if k > abs(a) + abs(b) and abs(contrib) <= SERIES_RTOL * abs(acc):
            break
        # advance all running quantities from k to k + 1
        term *= (a + k) * (b + k) / ((k + 1.0) * (k + m + 1.0)) * w
        psi_k1 += 1.0 / (k + 1.0)
        psi_km1 += 1.0 / (k + m + 1.0)
        psi_a += 1.0 / (a + k)
        psi_b += 1.0 / (b + k)
        k += 1
        if k > MAX_TERMS:
            raise ConvergenceError(
                f"logarithmic hypergeometric series did not converge (w={w})")
    return total - pref * acc


def _ferrers_series(nu, m, t):
    # P_nu^m(t) = s^m C_m 2F1(m-nu, m+nu+1; m+1; (1-t)/2), nu non-integer
    coef = 1.0
    for j in range(m):
        coef *= (nu - j) * (nu + j + 1.0) / (2.0 * (j + 1.0))
    if m:
        coef *= ((1.0 - t) * (1.0 + t)) ** (0.5 * m)
    a = m - nu
    b = m + nu + 1.0
    if t >= 0.0:
        return coef * _hyp2f1_direct(a, b, m + 1.0, 0.5 * (1.0 - t))
    return coef * _hyp2f1_log(a, b, m, 0.5 * (1.0 + t))


def _legendre_integer(n, m, t):
    # extended precision keeps the relative error small next to the roots,
    # where the three-term recurrence cancels
    if n < m:
        return 0.0
    ld = np.longdouble
    x = ld(t)
    s = np.sqrt(max((ld(1) - x) * (ld(1) + x), ld(0)))
    pmm = ld(1)
    for j in range(1, m + 1):
        pmm *= (2 * j - 1) * s
    if n == m:
        return float(pmm)
    p_prev = pmm
    p = (2 * m + 1) * x * pmm
    for ell in range(m + 1, n):
        p_prev, p = p, ((2 * ell + 1) * x * p - (ell + m) * p_prev) / (ell - m + 1)
    return float(p)


def legendre_p(lam, m, t):
    """P_lam^m(t) without the Condon-Shortley phase.

    Integer degrees accept |t| <= 1; other degrees need |t| < 1.
    """
    if lam < -0.5:
        lam = -lam - 1.0
    # a degree this close to an integer agrees with it to machine precision,
    # and the log connection formula would overflow in psi(-nu)
    near = math.floor(lam + 0.5)
    if abs(lam - near) <= INTEGER_SNAP * max(1.0, near):
        return _legendre_integer(int(near), m, t)
    if lam < m + 2.0:
        return _ferrers_series(lam, m, t)
    # anchor two degrees in [m, m + 2) then recur upward in the degree
    shift = int(math.floor(lam - m))
    nu = lam - shift
    p_prev = _ferrers_series(nu, m, t)
    p = _ferrers_series(nu + 1.0, m, t)
    nu += 1.0
    for _ in range(shift - 1):
        p_prev, p = p, ((2.0 * nu + 1.0) * t * p - (nu + m) * p_prev) / (nu - m + 1.0)
        nu += 1.0
    return p


def legendre_p_dt(lam, m, t):
    s = math.sqrt((1.0 - t) * (1.0 + t))
    p_m = legendre_p(lam, m, t)
    p_m1 = legendre_p(lam, m + 1, t)
    return (p_m1 - m * t * p_m / s) / s


def legendre_p_dt2(lam, m, t):
    s2 = (1.0 - t) * (1.0 + t)
    s = math.sqrt(s2)
    p_m = legendre_p(lam, m, t)
    p_m1 = legendre_p(lam, m + 1, t)
    p_m2 = legendre_p(lam, m + 2, t)
    d1 = (p_m1 - m * t * p_m / s) / s
    d1_next = p_m2 / s - (m + 1.0) * t * p_m1 / s2
    return (d1_next / s + p_m1 * t / (s2 * s)
            - m * ((1.0 + t * t) / (s2 * s2) * p_m + t / s2 * d1))


def legendre_p_many(lams, m, t):
    lams = np.asarray(lams, dtype=float)
    out = np.empty(lams.shape)
    flat = out.reshape(-1)
    for i, lam in enumerate(lams.reshape(-1)):
        flat[i] = legendre_p(float(lam), m, t)
    return out


def legendre_p_dt_many(lams, m, t):
    lams = np.asarray(lams, dtype=float)
    out = np.empty(lams.shape)
    flat = out.reshape(-1)
    for i, lam in enumerate(lams.reshape(-1)):
        flat[i] = legendre_p_dt(float(lam), m, t)
    return out


# --------------------------------------------------------------------------
# cell-area fractions


def _clip_half(px, py, axis, bound, keep_greater):
    ox, oy = [], []
    n = len(px)
    for i in range(n):
        ax, ay = px[i - 1], py[i - 1]
        bx, by = px[i], py[i]
        va = ax if axis == 0 else ay
        vb = bx if axis == 0 else by
        ina = va >= bound if keep_greater else va <= bound
        inb = vb >= bound if keep_greater else vb <= bound
        if inb:
            if not ina:
                f = (bound - va) / (vb - va)
                ox.append(ax + f * (bx - ax))
                oy.append(ay + f * (by - ay))
            ox.append(bx)
            oy.append(by)
        elif ina:
            f = (bound - va) / (vb - va)
            ox.append(ax + f * (bx - ax))
            oy.append(ay + f * (by - ay))
    return ox, oy


def clipped_area(px, py, x0, x1, y0, y1):
    """Area of a simple polygon intersected with an axis-aligned box."""
    px, py = list(px), list(py)
    for axis, bound, greater in ((0, x0, True), (0, x1, False),
                                 (1, y0, True), (1, y1, False)):
        px, py = _clip_half(px, py, axis, bound, greater)
        if len(px) < 3:
            return 0.0
    area = 0.0
    n = len(px)
    for i in range(n):
        area += px[i - 1] * py[i] - px[i] * py[i - 1]
    return abs(0.5 * area)


def polygon_fractions(vx, vy, edges):
    """Fraction of each grid cell covered by a polygon.

    Parameters
    ----------
    vx, vy : array_like
        Polygon vertices in order.
    edges : ndarray, shape (N + 1,)
        Cell edges, shared by both axes.

    Returns
    -------
    ndarray, shape (N, N)
        Fractions indexed ``[iy, ix]``.
    """
    vx = np.asarray(vx, dtype=float)
    vy = np.asarray(vy, dtype=float)
    edges = np.asarray(edges, dtype=float)
    n = edges.size - 1
    h = edges[1] - edges[0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    cx, cy = np.meshgrid(centers, centers, indexing="xy")
    inside = np.zeros((n, n), dtype=bool)
    nv = vx.size
    for i in range(nv):
        ax, ay, bx, by = vx[i - 1], vy[i - 1], vx[i], vy[i]
        crosses = (ay > cy) != (by > cy)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = ax + (cy - ay) * (bx - ax) / (by - ay)
        inside ^= crosses & (cx < xint)
    frac = inside.astype(float)
    # cells touched by an edge get the exact clipped area
    boundary = np.zeros((n, n), dtype=bool)
    for i in range(nv):
        ax, ay, bx, by = vx[i - 1], vy[i - 1], vx[i], vy[i]
        ix0 = max(int(np.searchsorted(edges, min(ax, bx), "right")) - 2, 0)
        ix1 = min(int(np.searchsorted(edges, max(ax, bx), "left")) + 1, n)
        iy0 = max(int(np.searchsorted(edges, min(ay, by), "right")) - 2, 0)
        iy1 = min(int(np.searchsorted(edges, max(ay, by), "left")) + 1, n)
        if ix0 >= ix1 or iy0 >= iy1:
            continue
        sub_x = cx[iy0:iy1, ix0:ix1]
        sub_y = cy[iy0:iy1, ix0:ix1]
        # separating-axis test along the edge normal
        nx, ny = by - ay, ax - bx
        half = 0.5 * h * (abs(nx) + abs(ny))
        dist = (sub_x - ax) * nx + (sub_y - ay) * ny
        boundary[iy0:iy1, ix0:ix1] |= np.abs(dist) <= half * (1.0 + 1e-12)
    for iy, ix in zip(*np.nonzero(boundary)):
        frac[iy, ix] = clipped_area(vx, vy, edges[ix], edges[ix + 1],
                                    edges[iy], edges[iy + 1]) / (h * h)
    return frac


def _chord_primitive(x, r):
    x = min(max(x, -r), r)
    return 0.5 * (x * math.sqrt(max(r * r - x * x, 0.0)) + r * r * math.asin(x / r))


def circle_box_area(r, x0, x1, y0, y1):
    """Area of the disk of radius r at the origin intersected with a box."""
    cuts = [x0, x1]
    for y in (y0, y1):
        if abs(y) < r:
            xc = math.sqrt(r * r - y * y)
            cuts.extend((-xc, xc))
    cuts.extend((-r, r))
    cuts = sorted(c for c in set(cuts) if x0 <= c <= x1)
    area = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        xm = 0.5 * (a + b)
        if abs(xm) >= r:
            continue
        sm = math.sqrt(r * r - xm * xm)
        if min(sm, y1) <= max(-sm, y0):
            continue
        arc = _chord_primitive(b, r) - _chord_primitive(a, r)
        upper = arc if sm < y1 else y1 * (b - a)
        lower = -arc if -sm > y0 else y0 * (b - a)
        area += upper - lower
    return area


def disk_fractions(xc, yc, r, edges):
    """Fraction of each grid cell covered by a disk, indexed ``[iy, ix]``."""
    edges = np.asarray(edges, dtype=float)
    n = edges.size - 1
    h = edges[1] - edges[0]
    ex = edges - xc
    ey = edges - yc
    x0, y0 = np.meshgrid(ex[:-1], ey[:-1], indexing="xy")
    x1, y1 = np.meshgrid(ex[1:], ey[1:], indexing="xy")
    near_x = np.where(x0 > 0, x0, np.where(x1 < 0, -x1, 0.0))
    near_y = np.where(y0 > 0, y0, np.where(y1 < 0, -y1, 0.0))
    far_x = np.maximum(np.abs(x0), np.abs(x1))
    far_y = np.maximum(np.abs(y0), np.abs(y1))
    dmin2 = near_x ** 2 + near_y ** 2
    dmax2 = far_x ** 2 + far_y ** 2
    frac = np.where(dmax2 <= r * r, 1.0, 0.0)
    cut = (dmin2 < r * r) & (dmax2 > r * r)
    for iy, ix in zip(*np.nonzero(cut)):
        frac[iy, ix] = circle_box_area(r, ex[ix], ex[ix + 1], ey[iy], ey[iy + 1]) / (h * h)
    return frac
