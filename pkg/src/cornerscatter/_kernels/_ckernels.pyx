# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot numerical kernels.

Same algorithms as ``_pykernels``; see that module for documentation.
"""
import numpy as np

from libc.math cimport sqrt, log, floor, fabs, fmax, asin, pow, sqrtl
from scipy.special.cython_special cimport psi, rgamma

from ..errors import ConvergenceError

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double SERIES_RTOL = 1e-15
cdef int MAX_TERMS = 20000
cdef double INTEGER_SNAP = 1e-18


cdef double _factorial(int n) noexcept nogil:
    cdef double out = 1.0
    cdef int j
    for j in range(2, n + 1):
        out *= j
    return out


cdef double _hyp2f1_direct(double a, double b, double c, double z) except? -1e308:
    cdef double term = 1.0, total = 1.0
    cdef int k = 0
    while True:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        k += 1
        if fabs(term) <= SERIES_RTOL * fabs(total) and k > fabs(a) + fabs(b):
            return total
        if k > MAX_TERMS:
            raise ConvergenceError(
                f"hypergeometric series did not converge (a={a}, b={b}, z={z})")


cdef double _hyp2f1_log(double a, double b, int m, double w) except? -1e308:
    cdef double c = a + b - m
    cdef double total = 0.0, coef, term, part, pref, logw
    cdef double psi_k1, psi_km1, psi_a, psi_b, acc, contrib
    cdef int k, j
    cdef double gamma_c = _factorial(m)
    if m > 0:
        coef = _factorial(m - 1) * gamma_c * rgamma(a) * rgamma(b)
        term = 1.0
        part = 1.0
        for k in range(m - 1):
            term *= (a - m + k) * (b - m + k) / ((k + 1.0) * (1.0 - m + k)) * w
            part += term
        total += coef * part * pow(w, -m)
    pref = (-1.0 if m % 2 else 1.0) * gamma_c * rgamma(a - m) * rgamma(b - m)
    if pref == 0.0:
        return total
    logw = log(w)
    psi_k1 = -EULER_GAMMA
    psi_km1 = -EULER_GAMMA
    for j in range(1, m + 1):
        psi_km1 += 1.0 / j
    psi_a = psi(a)
    psi_b = psi(b)
    term = 1.0 / gamma_c
    acc = 0.0
    k = 0
    while True:
        contrib = term * (logw - psi_k1 - psi_km1 + psi_a + psi_b)
        acc += contrib
        if k > fabs(a) + fabs(b) and fabs(contrib) <= SERIES_RTOL * fabs(acc):
            break
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


cdef double _ferrers_series(double nu, int m, double t) except? -1e308:
    cdef double coef = 1.0
    cdef int j
    for j in range(m):
        coef *= (nu - j) * (nu + j + 1.0) / (2.0 * (j + 1.0))
    if m:
        coef *= pow((1.0 - t) * (1.0 + t), 0.5 * m)
    if t >= 0.0:
        return coef * _hyp2f1_direct(m - nu, m + nu + 1.0, m + 1.0, 0.5 * (1.0 - t))
    return coef * _hyp2f1_log(m - nu, m + nu + 1.0, m, 0.5 * (1.0 + t))


cdef double _legendre_integer(int n, int m, double t) noexcept:
    # long double keeps the relative error small next to the roots
    cdef long double x = t, s, pmm, p_prev, p, p_next
    cdef int j, ell
    if n < m:
        return 0.0
    s = (1.0 - x) * (1.0 + x)
    s = sqrtl(s) if s > 0.0 else 0.0
    pmm = 1.0
    for j in range(1, m + 1):
        pmm *= (2.0 * j - 1.0) * s
    if n == m:
        return <double>pmm
    p_prev = pmm
    p = (2.0 * m + 1.0) * x * pmm
    for ell in range(m + 1, n):
        p_next = ((2.0 * ell + 1.0) * x * p - (ell + m) * p_prev) / (ell - m + 1.0)
        p_prev = p
        p = p_next
    return <double>p


cdef double _legendre_p(double lam, int m, double t) except? -1e308:
    cdef int shift, i
    cdef double nu, p_prev, p, p_next, near
    if lam < -0.5:
        lam = -lam - 1.0
    # a degree this close to an integer agrees with it to machine precision,
    # and the log connection formula would overflow in psi(-nu)
    near = floor(lam + 0.5)
    if fabs(lam - near) <= INTEGER_SNAP * fmax(1.0, near):
        return _legendre_integer(<int>near, m, t)
    if lam < m + 2.0:
        return _ferrers_series(lam, m, t)
    shift = <int>floor(lam - m)
    nu = lam - shift
    p_prev = _ferrers_series(nu, m, t)
    p = _ferrers_series(nu + 1.0, m, t)
    nu += 1.0
    for i in range(shift - 1):
        p_next = ((2.0 * nu + 1.0) * t * p - (nu + m) * p_prev) / (nu - m + 1.0)
        p_prev = p
        p = p_next
        nu += 1.0
    return p


cdef double _legendre_p_dt(double lam, int m, double t) except? -1e308:
    cdef double s = sqrt((1.0 - t) * (1.0 + t))
    cdef double p_m = _legendre_p(lam, m, t)
    cdef double p_m1 = _legendre_p(lam, m + 1, t)
    return (p_m1 - m * t * p_m / s) / s


def legendre_p(double lam, int m, double t):
    return _legendre_p(lam, m, t)


def legendre_p_dt(double lam, int m, double t):
    return _legendre_p_dt(lam, m, t)


def legendre_p_dt2(double lam, int m, double t):
    cdef double s2 = (1.0 - t) * (1.0 + t)
    cdef double s = sqrt(s2)
    cdef double p_m = _legendre_p(lam, m, t)
    cdef double p_m1 = _legendre_p(lam, m + 1, t)
    cdef double p_m2 = _legendre_p(lam, m + 2, t)
    cdef double d1 = (p_m1 - m * t * p_m / s) / s
    cdef double d1_next = p_m2 / s - (m + 1.0) * t * p_m1 / s2
    return (d1_next / s + p_m1 * t / (s2 * s)
            - m * ((1.0 + t * t) / (s2 * s2) * p_m + t / s2 * d1))


def legendre_p_many(lams, int m, double t):
    cdef double[::1] lv = np.ascontiguousarray(lams, dtype=np.float64).reshape(-1)
    out = np.empty(lv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(lv.shape[0]):
        ov[i] = _legendre_p(lv[i], m, t)
    return out.reshape(np.shape(lams))


def legendre_p_dt_many(lams, int m, double t):
    cdef double[::1] lv = np.ascontiguousarray(lams, dtype=np.float64).reshape(-1)
    out = np.empty(lv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(lv.shape[0]):
        ov[i] = _legendre_p_dt(lv[i], m, t)
    return out.reshape(np.shape(lams))


# --------------------------------------------------------------------------
# cell-area fractions

cdef int _clip_half(double[::1] px, double[::1] py, int n,
                    double[::1] ox, double[::1] oy,
                    int axis, double bound, bint keep_greater) noexcept nogil:
    cdef int i, cnt = 0
    cdef double ax, ay, bx, by, va, vb, f
    cdef bint ina, inb
    for i in range(n):
        ax = px[(i - 1 + n) % n]
        ay = py[(i - 1 + n) % n]
        bx = px[i]
        by = py[i]
        va = ax if axis == 0 else ay
        vb = bx if axis == 0 else by
        ina = (va >= bound) if keep_greater else (va <= bound)
        inb = (vb >= bound) if keep_greater else (vb <= bound)
        if inb:
            if not ina:
                f = (bound - va) / (vb - va)
                ox[cnt] = ax + f * (bx - ax)
                oy[cnt] = ay + f * (by - ay)
                cnt += 1
            ox[cnt] = bx
            oy[cnt] = by
            cnt += 1
        elif ina:
            f = (bound - va) / (vb - va)
            ox[cnt] = ax + f * (bx - ax)
            oy[cnt] = ay + f * (by - ay)
            cnt += 1
    return cnt


cdef double _clipped_area(double[::1] vx, double[::1] vy, int nv,
                          double[::1] ax, double[::1] ay,
                          double[::1] bx, double[::1] by,
                          double x0, double x1, double y0, double y1) noexcept nogil:
    cdef int n, i
    cdef double area = 0.0
    n = _clip_half(vx, vy, nv, ax, ay, 0, x0, True)
    if n < 3:
        return 0.0
    n = _clip_half(ax, ay, n, bx, by, 0, x1, False)
    if n < 3:
        return 0.0
    n = _clip_half(bx, by, n, ax, ay, 1, y0, True)
    if n < 3:
        return 0.0
    n = _clip_half(ax, ay, n, bx, by, 1, y1, False)
    if n < 3:
        return 0.0
    for i in range(n):
        area += bx[(i - 1 + n) % n] * by[i] - bx[i] * by[(i - 1 + n) % n]
    return fabs(0.5 * area)


def clipped_area(px, py, double x0, double x1, double y0, double y1):
    cdef double[::1] vx = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] vy = np.ascontiguousarray(py, dtype=np.float64)
    cdef int nv = vx.shape[0]
    cdef double[::1] ax = np.empty(2 * nv + 8)
    cdef double[::1] ay = np.empty(2 * nv + 8)
    cdef double[::1] bx = np.empty(2 * nv + 8)
    cdef double[::1] by = np.empty(2 * nv + 8)
    return _clipped_area(vx, vy, nv, ax, ay, bx, by, x0, x1, y0, y1)


def polygon_fractions(px, py, edges_in):
    cdef double[::1] vx = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] vy = np.ascontiguousarray(py, dtype=np.float64)
    cdef double[::1] edges = np.ascontiguousarray(edges_in, dtype=np.float64)
    cdef int nv = vx.shape[0]
    cdef int n = edges.shape[0] - 1
    cdef double h = edges[1] - edges[0]
    cdef double[::1] ax = np.empty(2 * nv + 8)
    cdef double[::1] ay = np.empty(2 * nv + 8)
    cdef double[::1] bx = np.empty(2 * nv + 8)
    cdef double[::1] by = np.empty(2 * nv + 8)
    out = np.zeros((n, n))
    cdef double[:, ::1] fv = out
    cdef double xmin = vx[0], xmax = vx[0], ymin = vy[0], ymax = vy[0]
    cdef int i, ix, iy, ix0, ix1, iy0, iy1
    for i in range(nv):
        xmin = min(xmin, vx[i])
        xmax = max(xmax, vx[i])
        ymin = min(ymin, vy[i])
        ymax = max(ymax, vy[i])
    ix0 = max(<int>floor((xmin - edges[0]) / h) - 1, 0)
    ix1 = min(<int>floor((xmax - edges[0]) / h) + 2, n)
    iy0 = max(<int>floor((ymin - edges[0]) / h) - 1, 0)
    iy1 = min(<int>floor((ymax - edges[0]) / h) + 2, n)
    with nogil:
        for iy in range(iy0, iy1):
            for ix in range(ix0, ix1):
                fv[iy, ix] = _clipped_area(vx, vy, nv, ax, ay, bx, by,
                                           edges[ix], edges[ix + 1],
                                           edges[iy], edges[iy + 1]) / (h * h)
    return out


cdef double _chord_primitive(double x, double r) noexcept nogil:
    if x > r:
        x = r
    if x < -r:
        x = -r
    cdef double q = r * r - x * x
    return 0.5 * (x * sqrt(q if q > 0.0 else 0.0) + r * r * asin(x / r))


cdef double _circle_box_area(double r, double x0, double x1,
                             double y0, double y1) noexcept nogil:
    cdef double cuts[8]
    cdef int nc = 0, i, j
    cdef double xc, tmp, a, b, xm, sm, arc, upper, lower, area = 0.0
    cdef double cand[8]
    cdef int ncand = 0
    cand[ncand] = x0; ncand += 1
    cand[ncand] = x1; ncand += 1
    cand[ncand] = -r; ncand += 1
    cand[ncand] = r; ncand += 1
    if fabs(y0) < r:
        xc = sqrt(r * r - y0 * y0)
        cand[ncand] = -xc; ncand += 1
        cand[ncand] = xc; ncand += 1
    if fabs(y1) < r:
        xc = sqrt(r * r - y1 * y1)
        cand[ncand] = -xc; ncand += 1
        cand[ncand] = xc; ncand += 1
    for i in range(ncand):
        if x0 <= cand[i] <= x1:
            cuts[nc] = cand[i]
            nc += 1
    for i in range(1, nc):
        tmp = cuts[i]
        j = i - 1
        while j >= 0 and cuts[j] > tmp:
            cuts[j + 1] = cuts[j]
            j -= 1
        cuts[j + 1] = tmp
    for i in range(nc - 1):
        a = cuts[i]
        b = cuts[i + 1]
        if b <= a:
            continue
        xm = 0.5 * (a + b)
        if fabs(xm) >= r:
            continue
        sm = sqrt(r * r - xm * xm)
        if min(sm, y1) <= max(-sm, y0):
            continue
        arc = _chord_primitive(b, r) - _chord_primitive(a, r)
        upper = arc if sm < y1 else y1 * (b - a)
        lower = -arc if -sm > y0 else y0 * (b - a)
        area += upper - lower
    return area


def circle_box_area(double r, double x0, double x1, double y0, double y1):
    return _circle_box_area(r, x0, x1, y0, y1)


def disk_fractions(double xc, double yc, double r, edges_in):
    cdef double[::1] edges = np.ascontiguousarray(edges_in, dtype=np.float64)
    cdef int n = edges.shape[0] - 1
    cdef double h = edges[1] - edges[0]
    out = np.zeros((n, n))
    cdef double[:, ::1] fv = out
    cdef int ix, iy
    cdef double x0, x1, y0, y1, nx, ny, fx, fy
    with nogil:
        for iy in range(n):
            y0 = edges[iy] - yc
            y1 = edges[iy + 1] - yc
            ny = y0 if y0 > 0 else (-y1 if y1 < 0 else 0.0)
            fy = max(fabs(y0), fabs(y1))
            for ix in range(n):
                x0 = edges[ix] - xc
                x1 = edges[ix + 1] - xc
                nx = x0 if x0 > 0 else (-x1 if x1 < 0 else 0.0)
                fx = max(fabs(x0), fabs(x1))
                if fx * fx + fy * fy <= r * r:
                    fv[iy, ix] = 1.0
                elif nx * nx + ny * ny < r * r:
                    fv[iy, ix] = _circle_box_area(r, x0, x1, y0, y1) / (h * h)
    return out
