"""Refractive-index grids on a square bounding box.

Cells are indexed ``[iy, ix]`` with centers ``-L + (j + 1/2) h`` and
``h = 2L/N``. Boundary cells carry the area-weighted average of ``q``.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .. import _kernels
from ..errors import DomainError

__all__ = ["ContrastField", "grid_edges", "grid_centers", "zero_contrast", "polygon_contrast",
           "disk_contrast", "sector_contrast", "square_vertices", "triangle_vertices",
           "parse_profile", "with_q0"]


def grid_edges(half_width: float, n: int) -> np.ndarray:
    return np.linspace(-half_width, half_width, n + 1)


def grid_centers(half_width: float, n: int) -> np.ndarray:
    h = 2 * half_width / n
    return -half_width + (np.arange(n) + 0.5) * h


@dataclass(frozen=True)
class ContrastField:
    """Cell values of ``q`` on ``[-L, L]^2``.

    Attributes
    ----------
    half_width : float
        ``L``.
    q : ndarray, shape (N, N)
        Complex refractive index per cell, ``[iy, ix]``; 1 outside the shape.
    fraction : ndarray, shape (N, N)
        Area fraction of each cell covered by the shape.
    shape : dict
        ``{"kind": "polygon" | "disk" | "sector" | "none", ...}``.
    q0 : complex
        Representative interior value, used for the resolution guard and
        for floor calibration.
    corner_contrast : float or None
        ``|q - 1|`` in the cell containing the first corner, for corner
        shapes. A zero here means the contrast vanishes at the corner.
    """

    half_width: float
    q: np.ndarray
    fraction: np.ndarray
    shape: dict
    q0: complex = 1.0
    corner_contrast: Optional[float] = None
    profile: str = "constant"

    def __post_init__(self):
        q = np.asarray(self.q)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DomainError("contrast grid must be square")
        if np.any(q.imag < -1e-14):
            raise DomainError("Im q must be non-negative (passive medium)")

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def h(self) -> float:
        return 2 * self.half_width / self.n

    @property
    def cell_area(self) -> float:
        return self.h ** 2

    @property
    def centers(self) -> np.ndarray:
        return grid_centers(self.half_width, self.n)

    @property
    def contrast(self) -> np.ndarray:
        """``1 - q`` per cell."""
        return 1 - self.q

    @property
    def support(self) -> np.ndarray:
        return self.q != 1

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.asarray(self.q).imag == 0))

    def max_index(self) -> float:
        return float(np.max(np.real(self.q)))

    def value_at(self, x: float, y: float) -> complex:
        """``q`` in the cell containing ``(x, y)``; 1 outside the box."""
        L = self.half_width
        if not (-L <= x < L and -L <= y < L):
            return 1.0
        ix = min(int((x + L) / self.h), self.n - 1)
        iy = min(int((y + L) / self.h), self.n - 1)
        return complex(self.q[iy, ix])


# --------------------------------------------------------------------------
# profiles

_ALLOWED_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt, "abs": np.abs,
                  "log": np.log, "tanh": np.tanh, "arctan2": np.arctan2, "where": np.where,
                  "minimum": np.minimum, "maximum": np.maximum}
_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load,
                  ast.Call, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
                  ast.Compare, ast.Lt, ast.LtE, ast.Gt, ast.GtE)


def parse_profile(expr: str) -> Callable:
    """Compile an index expression in ``x``, ``y``, ``r`` (and ``pi``).

    Only arithmetic, comparisons and a fixed set of numpy functions are
    allowed, e.g. ``"1 + (1 - r**2)**2"``.
    """
    tree = ast.parse(expr, mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise DomainError(f"unsupported syntax in profile {expr!r}")
        if isinstance(node, ast.Name) and node.id not in {"x", "y", "r", "pi", "j", *_ALLOWED_FUNCS}:
            raise DomainError(f"unknown name {node.id!r} in profile {expr!r}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name)
                                               and node.func.id in _ALLOWED_FUNCS):
            raise DomainError(f"unsupported call in profile {expr!r}")
    code = compile(tree, "<profile>", "eval")

    def fn(x, y):
        env = dict(_ALLOWED_FUNCS, x=x, y=y, r=np.hypot(x, y), pi=math.pi, j=1j)
        return np.broadcast_to(np.asarray(eval(code, {"__builtins__": {}}, env), dtype=complex),
                               np.broadcast(x, y).shape)
    return fn


def _assemble(frac, half_width, q0, profile, shape, corner=None):
    n = frac.shape[0]
    c = grid_centers(half_width, n)
    X, Y = np.meshgrid(c, c, indexing="xy")
    if profile is None:
        inner = np.full(frac.shape, complex(q0))
        label = "constant"
    else:
        fn = parse_profile(profile) if isinstance(profile, str) else profile
        inner = np.asarray(fn(X, Y), dtype=complex)
        label = profile if isinstance(profile, str) else "callable"
    q = 1 + frac * (inner - 1)
    if np.all(q.imag == 0):
        q = q.real.astype(complex)
    corner_contrast = None
    if corner is not None:
        h = 2 * half_width / n
        ix = min(max(int((corner[0] + half_width) / h), 0), n - 1)
        iy = min(max(int((corner[1] + half_width) / h), 0), n - 1)
        corner_contrast = float(abs(inner[iy, ix] - 1))
    rep = complex(q0) if profile is None else complex(np.mean(inner[frac > 0])) if np.any(frac > 0) else 1.0
    return ContrastField(half_width, q, frac, shape, rep, corner_contrast, label)


def with_q0(field_: ContrastField, q0: complex) -> ContrastField:
    """Same shape and grid with a different constant index."""
    q = 1 + field_.fraction * (complex(q0) - 1)
    return ContrastField(field_.half_width, q, field_.fraction, field_.shape, complex(q0),
                         field_.corner_contrast and abs(complex(q0) - 1), "constant")


def zero_contrast(half_width: float, n: int) -> ContrastField:
    frac = np.zeros((n, n))
    return ContrastField(half_width, np.ones((n, n), dtype=complex), frac, {"kind": "none"}, 1.0)


def polygon_contrast(vertices, q0: complex, half_width: float, n: int,
                     profile: Union[str, Callable, None] = None) -> ContrastField:
    """Rasterize a simple polygon with exact area fractions on boundary cells."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise DomainError("polygon needs at least three (x, y) vertices")
    if np.max(np.abs(v)) >= half_width:
        raise DomainError("polygon must lie strictly inside the bounding box")
    frac = _kernels.polygon_fractions(v[:, 0], v[:, 1], grid_edges(half_width, n))
    shape = {"kind": "polygon", "vertices": v.tolist()}
    return _assemble(np.asarray(frac), half_width, q0, profile, shape, corner=v[0])


def disk_contrast(center, radius: float, q0: complex, half_width: float, n: int,
                  profile: Union[str, Callable, None] = None) -> ContrastField:
    xc, yc = map(float, center)
    if radius <= 0:
        raise DomainError("radius must be positive")
    if max(abs(xc), abs(yc)) + radius >= half_width:
        raise DomainError("disk must lie strictly inside the bounding box")
    frac = _kernels.disk_fractions(xc, yc, float(radius), grid_edges(half_width, n))
    shape = {"kind": "disk", "center": [xc, yc], "radius": float(radius)}
    return _assemble(np.asarray(frac), half_width, q0, profile, shape)


def sector_contrast(omega: float, radius: float, q0: complex, half_width: float, n: int,
                    profile: Union[str, Callable, None] = None, arc_points: int = 512) -> ContrastField:
    """Circular sector of opening ``omega`` with its corner at the origin.

    The arc is replaced by a polygon with ``arc_points`` segments, which
    changes the area by a relative amount of order ``(omega/arc_points)^2``.
    """
    if not 0 < omega < 2 * math.pi:
        raise DomainError("sector opening must lie in (0, 2 pi)")
    th = np.linspace(0.0, omega, arc_points + 1)
    arc = np.stack([radius * np.cos(th), radius * np.sin(th)], axis=1)
    verts = np.vstack([[0.0, 0.0], arc])
    fld = polygon_contrast(verts, q0, half_width, n, profile)
    shape = {"kind": "sector", "omega": float(omega), "radius": float(radius)}
    return ContrastField(fld.half_width, fld.q, fld.fraction, shape, fld.q0,
                         fld.corner_contrast, fld.profile)


def square_vertices(side: float = 1.0, center=(0.0, 0.0)) -> np.ndarray:
    a = side / 2
    cx, cy = center
    return np.array([[cx - a, cy - a], [cx + a, cy - a], [cx + a, cy + a], [cx - a, cy + a]])


def triangle_vertices(side: float = 1.0) -> np.ndarray:
    """Equilateral triangle centred at its centroid."""
    h = side * math.sqrt(3) / 2
    return np.array([[-side / 2, -h / 3], [side / 2, -h / 3], [0.0, 2 * h / 3]])
