"""Rank and null-space computations in three arithmetics.

* interval: mpmath interval arithmetic; certifies full column rank when
  every pivot interval excludes zero.
* exact: sympy domain matrices over an algebraic extension of QQ.
* float: SVD with a relative singular-value threshold.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass

import mpmath
import numpy as np
import sympy as sp

__all__ = ["IntervalRankResult", "interval_precision", "interval_full_rank",
           "exact_rank", "exact_nullspace", "exact_solve", "float_rank", "float_nullspace"]

FLOAT_RANK_TOL = 1e-8


@contextlib.contextmanager
def interval_precision(bits: int):
    """Temporarily set the working precision of ``mpmath.iv``."""
    old = mpmath.iv.prec
    mpmath.iv.prec = int(bits)
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.prec = old


@dataclass(frozen=True)
class IntervalRankResult:
    """Outcome of interval Gaussian elimination.

    ``certified`` is True when full column rank was proven. ``rank_lower``
    is the number of pivots found before elimination stopped.
    """

    certified: bool
    rank_lower: int
    columns: int
    min_pivot_magnitude: float
    max_entry_width: float
    precision_bits: int


def _mig(x) -> float:
    # endpoints are point intervals, so these comparisons are exact
    if x.a <= 0 <= x.b:
        return 0.0
    return min(abs(float(x.a)), abs(float(x.b)))


def _width(x) -> float:
    return float(x.delta.b)


def interval_full_rank(rows, precision_bits: int) -> IntervalRankResult:
    """Try to prove that a matrix of intervals has full column rank.

    Uses Gaussian elimination with the pivot of largest mignitude (smallest
    absolute value over the interval). Elimination stops at the first column
    with no zero-free candidate.
    """
    iv = mpmath.iv
    a = [list(r) for r in rows]
    ncols = len(a[0]) if a else 0
    used = [False] * len(a)
    min_piv = float("inf")
    max_width = max((_width(x) for r in a for x in r), default=0.0)
    for col in range(ncols):
        best, best_mig = None, 0.0
        for r, row in enumerate(a):
            if used[r]:
                continue
            m = _mig(row[col])
            if m > best_mig:
                best, best_mig = r, m
        if best is None:
            return IntervalRankResult(False, col, ncols, 0.0, max_width, precision_bits)
        used[best] = True
        min_piv = min(min_piv, best_mig)
        prow = a[best]
        piv = prow[col]
        for r, row in enumerate(a):
            if used[r]:
                continue
            x = row[col]
            if x.a == 0 and x.b == 0:
                continue
            f = x / piv
            for c in range(col + 1, ncols):
                if prow[c].a == 0 and prow[c].b == 0:
                    continue
                row[c] = row[c] - f * prow[c]
            row[col] = iv.mpf(0)
        max_width = max(max_width, max((_width(x) for r in a for x in r), default=0.0))
    return IntervalRankResult(True, ncols, ncols, min_piv, max_width, precision_bits)


def _domain_matrix(rows):
    mat = sp.Matrix(rows)
    return mat.to_DM(extension=True)


def exact_rank(rows) -> int:
    if not rows:
        return 0
    return int(_domain_matrix(rows).rank())


def exact_nullspace(rows, ncols: int) -> list[list]:
    """Exact null-space basis vectors as lists of sympy numbers."""
    if not rows:
        return [[sp.Integer(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    dm = _domain_matrix(rows)
    ns = dm.nullspace()
    mat = ns.to_Matrix()
    return [[sp.nsimplify(x) if x.is_Float else x for x in mat.row(i)]
            for i in range(mat.rows)]


def exact_solve(rows, rhs):
    """Solve ``A x = b`` exactly.

    Returns ``(particular, null_basis)`` with free parameters set to zero in
    the particular solution, or ``(None, null_basis)`` if inconsistent.
    """
    a = sp.Matrix(rows)
    b = sp.Matrix(rhs)
    ncols = a.cols
    null = exact_nullspace(rows, ncols)
    aug = a.row_join(b)
    if exact_rank(aug.tolist()) != exact_rank(rows):
        return None, null
    sol, params = a.gauss_jordan_solve(b)
    sol = sol.subs({p: 0 for p in params})
    return [sp.simplify(x) for x in sol], null


NOISE_ROW_TOL = 1e-13


def _scaled(rows):
    a = np.array(rows, dtype=complex)
    if np.all(a.imag == 0):
        a = a.real
    scale = np.max(np.abs(a), axis=1, keepdims=True)
    # rows that vanish exactly often come out at rounding level (cos(pi/2),
    # odd Legendre values at 0); rescaling them would invent rank
    noise = scale <= NOISE_ROW_TOL * max(float(np.max(scale, initial=0.0)), 1.0)
    a = np.where(noise, 0.0, a)
    scale[noise] = 1.0
    return a / scale


def float_rank(rows, tol: float = FLOAT_RANK_TOL) -> int:
    """Numerical rank after scaling each row to unit max-norm."""
    if len(rows) == 0:
        return 0
    s = np.linalg.svd(_scaled(rows), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def float_nullspace(rows, ncols: int, tol: float = FLOAT_RANK_TOL) -> np.ndarray:
    if len(rows) == 0:
        return np.eye(ncols)
    a = _scaled(rows)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return vh[rank:].conj()
