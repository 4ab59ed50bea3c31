"""Sector and circular-cone geometries, plus angle parsing."""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .errors import DomainError

EXCLUSION_TOL = 1e-12


class BoundaryCondition(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown boundary condition {value!r}") from None


def _pi_fraction_close(omega: float, frac: Optional[Fraction]) -> Optional[Fraction]:
    if frac is None:
        return None
    if abs(float(frac) * math.pi - omega) > 1e-13 * max(1.0, abs(omega)):
        raise DomainError(f"angle {omega} does not match {frac}*pi")
    return frac


@dataclass(frozen=True)
class SectorGeometry:
    """Infinite planar sector ``{0 < theta < omega}``.

    Parameters
    ----------
    omega : float
        Opening angle in radians, strictly between 0 and 2*pi.
    pi_fraction : Fraction, optional
        Exact value of ``omega / pi`` when known. Enables the exact
        algebraic path in the null-space computations.
    """

    omega: float
    pi_fraction: Optional[Fraction] = field(default=None, compare=False)

    def __post_init__(self):
        if not (0.0 < self.omega < 2.0 * math.pi):
            raise DomainError(f"sector opening must lie in (0, 2*pi), got {self.omega}")
        object.__setattr__(self, "pi_fraction",
                           _pi_fraction_close(self.omega, self.pi_fraction))

    @classmethod
    def from_pi_fraction(cls, frac) -> "SectorGeometry":
        frac = Fraction(frac)
        return cls(float(frac) * math.pi, frac)

    @property
    def is_excluded(self) -> bool:
        """True for the flat opening omega = pi."""
        return abs(self.omega - math.pi) < EXCLUSION_TOL

    @property
    def dimension(self) -> int:
        return 2


@dataclass(frozen=True)
class ConeGeometry:
    """Right circular cone ``{0 <= theta < omega}`` around the positive x3 axis.

    ``omega`` is the half-angle; the full opening is ``2*omega``.
    """

    omega: float
    pi_fraction: Optional[Fraction] = field(default=None, compare=False)

    def __post_init__(self):
        if not (0.0 < self.omega < math.pi):
            raise DomainError(f"cone half-angle must lie in (0, pi), got {self.omega}")
        object.__setattr__(self, "pi_fraction",
                           _pi_fraction_close(self.omega, self.pi_fraction))

    @classmethod
    def from_pi_fraction(cls, frac) -> "ConeGeometry":
        frac = Fraction(frac)
        return cls(float(frac) * math.pi, frac)

    @property
    def is_excluded(self) -> bool:
        """True for the half-space case omega = pi/2."""
        return abs(self.omega - 0.5 * math.pi) < EXCLUSION_TOL

    @property
    def dimension(self) -> int:
        return 3


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub,
           ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text, degrees: bool = False) -> tuple[float, Optional[Fraction]]:
    """Parse an angle such as ``"2*pi/3"``, ``"1.2"`` or ``"pi"``.

    Returns the value in radians and, when the expression is a rational
    multiple of pi, the exact multiple. With ``degrees=True`` the input is
    read in degrees and converted.
    """
    if isinstance(text, (int, float)):
        value = float(text)
        return (math.radians(value), None) if degrees else (value, None)
    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError:
        raise DomainError(f"cannot parse angle {text!r}") from None

    # Evaluate as (rational coefficient, power of pi); floats poison exactness.
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            if isinstance(node.value, int):
                return Fraction(node.value), 0, True
            return Fraction(node.value), 0, False
        if isinstance(node, ast.Name) and node.id == "pi":
            return Fraction(1), 1, True
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            c, p, ex = ev(node.operand)
            return (-c if isinstance(node.op, ast.USub) else c), p, ex
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            ca, pa, ea = ev(node.left)
            cb, pb, eb = ev(node.right)
            if isinstance(node.op, ast.Mult):
                return ca * cb, pa + pb, ea and eb
            if isinstance(node.op, ast.Div):
                if cb == 0:
                    raise DomainError("division by zero in angle")
                return ca / cb, pa - pb, ea and eb
            if pa != pb:
                # mixed terms: fall back to floats
                val = _BINOPS[type(node.op)](float(ca) * math.pi ** pa,
                                             float(cb) * math.pi ** pb)
                return Fraction(val), 0, False
            return _BINOPS[type(node.op)](ca, cb), pa, ea and eb
        raise DomainError(f"unsupported token in angle {text!r}")

    coef, power, exact = ev(tree)
    value = float(coef) * math.pi ** power
    if degrees:
        frac = coef / 180 if (exact and power == 0) else None
        return math.radians(value), frac
    frac = coef if (exact and power == 1) else None
    return value, frac
