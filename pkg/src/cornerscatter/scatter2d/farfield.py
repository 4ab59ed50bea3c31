"""Far-field patterns and the identities they satisfy."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .solver import TotalField

__all__ = ["FarFieldPattern", "far_field", "far_field_at", "farfield_constant",
           "optical_theorem_residual", "l2_norm", "uniform_angles", "MIN_SAMPLES"]

MIN_SAMPLES = 64


def farfield_constant(k: float) -> complex:
    """``e^{i pi/4} / sqrt(8 pi k)`` from the large-argument Hankel asymptotics."""
    return cmath.exp(0.25j * math.pi) / math.sqrt(8 * math.pi * k)


def uniform_angles(m: int) -> np.ndarray:
    return 2 * math.pi * np.arange(m) / m


def l2_norm(values) -> float:
    """Trapezoid ``L^2(S^1)`` norm of samples at uniform angles."""
    v = np.asarray(values)
    return math.sqrt(2 * math.pi / v.size * float(np.sum(np.abs(v) ** 2)))


@dataclass(frozen=True)
class FarFieldPattern:
    """Samples ``u_inf(x_j)`` at ``M`` uniform angles, with their ``L^2`` norm."""

    k: float
    angles: np.ndarray
    values: np.ndarray
    norm: float

    def __post_init__(self):
        if len(self.values) < MIN_SAMPLES:
            raise DomainError(f"far-field pattern needs at least {MIN_SAMPLES} samples")

    @classmethod
    def from_values(cls, k, values):
        values = np.asarray(values, dtype=complex)
        return cls(float(k), uniform_angles(values.size), values, l2_norm(values))

    @property
    def abs_min(self) -> float:
        return float(np.min(np.abs(self.values)))

    @property
    def abs_max(self) -> float:
        return float(np.max(np.abs(self.values)))

    def distance(self, other: "FarFieldPattern") -> float:
        if self.values.shape != other.values.shape:
            raise DomainError("patterns sampled at different angles")
        return l2_norm(self.values - other.values)

    def relative_error(self, reference: "FarFieldPattern") -> float:
        return self.distance(reference) / reference.norm


def far_field_at(total: TotalField, angles) -> np.ndarray:
    """``u_inf(x) = c k^2 int e^{-i k x . y} (q - 1) u dy`` at the given angles.

    The cell-center rule factorizes in ``x`` and ``y``, so the sum is two
    small matrix products.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    c = total.contrast.centers
    k = total.k
    ex = np.exp(-1j * k * np.outer(np.cos(angles), c))
    ey = np.exp(-1j * k * np.outer(np.sin(angles), c))
    w = total.density
    s = np.einsum("mi,ij,mj->m", ey, w, ex)
    return farfield_constant(k) * s


def far_field(total: TotalField, m: int = 256) -> FarFieldPattern:
    if m < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} far-field samples")
    return FarFieldPattern.from_values(total.k, far_field_at(total, uniform_angles(m)))


def optical_theorem_residual(pattern: FarFieldPattern, forward: complex) -> float:
    """Relative mismatch in ``||u_inf||^2 = sqrt(8 pi/k) Im(e^{-i pi/4} u_inf(d))``.

    ``forward`` is the far field in the incidence direction. Valid for
    real ``q`` and plane-wave incidence.
    """
    lhs = pattern.norm ** 2
    rhs = math.sqrt(8 * math.pi / pattern.k) * (cmath.exp(-0.25j * math.pi) * forward).imag
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0 else abs(lhs - rhs) / scale
