"""Incident fields: plane waves, point sources and Herglotz wave functions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import hankel1

from ..errors import DomainError

__all__ = ["IncidentField", "plane_wave", "point_source", "herglotz", "incident_values"]


@dataclass(frozen=True)
class IncidentField:
    """An entire (or, for point sources, locally regular) Helmholtz solution.

    ``kind`` is ``"plane"``, ``"point"`` or ``"herglotz"``. Plane waves
    store a unit ``direction``; point sources a ``source`` location;
    Herglotz fields complex ``density`` samples at uniform angles
    ``2 pi j / M``.
    """

    kind: str
    direction: Optional[tuple] = None
    source: Optional[tuple] = None
    density: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "plane":
            d = np.asarray(self.direction, dtype=float)
            if d.shape != (2,) or abs(np.hypot(*d) - 1) > 1e-12:
                raise DomainError("plane-wave direction must be a unit 2-vector")
        elif self.kind == "point":
            if self.source is None or len(self.source) != 2:
                raise DomainError("point source needs a location")
        elif self.kind == "herglotz":
            if self.density is None or np.asarray(self.density).size < 1:
                raise DomainError("Herglotz field needs density samples")
        else:
            raise DomainError(f"unknown incident kind {self.kind!r}")

    @property
    def angle(self) -> float:
        return math.atan2(self.direction[1], self.direction[0])

    def scaled(self, factor: complex) -> "IncidentField":
        """Multiply by a constant (implemented for Herglotz fields only)."""
        if self.kind != "herglotz":
            raise DomainError("only Herglotz fields carry an amplitude")
        return IncidentField("herglotz", density=np.asarray(self.density) * factor)


def plane_wave(angle: float) -> IncidentField:
    """Plane wave ``exp(i k x . d)`` with ``d = (cos angle, sin angle)``."""
    return IncidentField("plane", direction=(math.cos(angle), math.sin(angle)))


def point_source(y) -> IncidentField:
    return IncidentField("point", source=(float(y[0]), float(y[1])))


def herglotz(density) -> IncidentField:
    """Herglotz field ``int exp(i k x . d) g(d) ds(d)`` from samples of ``g``."""
    g = np.atleast_1d(np.asarray(density, dtype=complex))
    return IncidentField("herglotz", density=g)


def incident_values(inc: IncidentField, k: float, x, y) -> np.ndarray:
    """Evaluate the incident field at points ``(x, y)`` (broadcast)."""
    if not k > 0:
        raise DomainError("wavenumber must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if inc.kind == "plane":
        d = inc.direction
        return np.exp(1j * k * (d[0] * x + d[1] * y))
    if inc.kind == "point":
        rho = np.hypot(x - inc.source[0], y - inc.source[1])
        if np.any(rho == 0):
            raise DomainError("point source coincides with an evaluation point")
        return 0.25j * hankel1(0, k * rho)
    g = np.asarray(inc.density, dtype=complex)
    m = g.size
    out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for j in range(m):
        a = 2 * math.pi * j / m
        out += g[j] * np.exp(1j * k * (math.cos(a) * x + math.sin(a) * y))
    return out * (2 * math.pi / m)
