"""Homogeneous polynomials with exact coefficients.

Coefficients are ``fractions.Fraction`` whenever possible. Algebraic or
complex values (for example ``sqrt(3)/2`` or ``1 + 2*I``) are held as sympy
expressions, and plain Python floats or complex numbers are accepted for
numerical work. Zero coefficients are never stored.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Number
from typing import Iterable, Mapping

import numpy as np
import sympy as sp
from sympy.core.evalf import PrecisionExhausted

__all__ = ["HomogeneousPolynomial", "monomial_exponents", "normalize_coefficient",
           "is_exact_zero", "legendre_coefficients"]


def normalize_coefficient(c):
    """Bring a coefficient into canonical form (Fraction when rational)."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (bool, int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, sp.Basic):
        if c.is_Rational:
            return Fraction(int(c.p), int(c.q))
        c = sp.expand(c)
        if c.is_Rational:
            return Fraction(int(c.p), int(c.q))
        return c
    if isinstance(c, (np.floating, np.complexfloating)):
        return c.item()
    return c


def is_exact_zero(c) -> bool:
    if isinstance(c, sp.Basic):
        if c == 0:
            return True
        if c.is_number:
            # strict evalf guarantees the digits it returns, so a clearly
            # nonzero value settles the question without simplification
            try:
                approx = complex(c.evalf(30, strict=True))
            except (PrecisionExhausted, TypeError, ValueError):
                approx = None
            if approx is not None and abs(approx) > 1e-20:
                return False
            if sp.simplify(c) == 0:
                return True
            # trig constants at rational multiples of pi defeat simplify
            verdict = c.equals(0)
            if verdict is not None:
                return bool(verdict)
            x = sp.Symbol("x")
            return sp.minimal_polynomial(c, x) == x
        return False
    return c == 0


def monomial_exponents(dimension: int, degree: int) -> list[tuple]:
    """Exponent tuples of all monomials of a degree, in descending lex order."""
    out = []
    if dimension == 1:
        return [(degree,)]
    for first in range(degree, -1, -1):
        for rest in monomial_exponents(dimension - 1, degree - first):
            out.append((first,) + rest)
    return out


def _coefficient_sum(a, b):
    if isinstance(a, sp.Basic) or isinstance(b, sp.Basic):
        return normalize_coefficient(sp.sympify(_to_sympy(a)) + _to_sympy(b))
    return normalize_coefficient(a + b)


def _coefficient_product(a, b):
    if isinstance(a, sp.Basic) or isinstance(b, sp.Basic):
        return normalize_coefficient(_to_sympy(a) * _to_sympy(b))
    return normalize_coefficient(a * b)


def _to_sympy(c):
    if isinstance(c, Fraction):
        return sp.Rational(c.numerator, c.denominator)
    if isinstance(c, sp.Basic):
        return c
    return sp.sympify(c)


class HomogeneousPolynomial:
    """Homogeneous polynomial in 2 or 3 variables.

    Parameters
    ----------
    dimension : int
        Number of variables.
    degree : int
        Total degree shared by every monomial.
    terms : mapping, optional
        Maps exponent tuples to coefficients.
    """

    __slots__ = ("dimension", "degree", "terms")

    def __init__(self, dimension: int, degree: int, terms: Mapping | None = None):
        if dimension not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        if degree < 0:
            raise ValueError("degree must be non-negative")
        self.dimension = int(dimension)
        self.degree = int(degree)
        self.terms = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != dimension or sum(exps) != degree or min(exps) < 0:
                raise ValueError(f"monomial {exps} does not match dimension/degree")
            c = normalize_coefficient(c)
            if not is_exact_zero(c):
                self.terms[exps] = c

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, dimension, degree):
        return cls(dimension, degree)

    @classmethod
    def monomial(cls, exps, coefficient=1):
        exps = tuple(exps)
        return cls(len(exps), sum(exps), {exps: coefficient})

    @classmethod
    def variable(cls, dimension, index):
        exps = [0] * dimension
        exps[index] = 1
        return cls.monomial(exps)

    @classmethod
    def constant(cls, dimension, value=1):
        return cls(dimension, 0, {(0,) * dimension: value})

    @classmethod
    def norm_squared(cls, dimension):
        """``|x|^2``."""
        terms = {}
        for i in range(dimension):
            e = [0] * dimension
            e[i] = 2
            terms[tuple(e)] = 1
        return cls(dimension, 2, terms)

    @classmethod
    def from_vector(cls, dimension, degree, vector, basis=None):
        basis = basis or monomial_exponents(dimension, degree)
        return cls(dimension, degree, dict(zip(basis, vector)))

    # -- basic protocol -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return not self.is_zero()

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), Fraction(0))

    def vector(self, basis=None):
        basis = basis or monomial_exponents(self.dimension, self.degree)
        return [self.coefficient(e) for e in basis]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, (Fraction, sp.Basic)) for c in self.terms.values())

    def _check_compatible(self, other):
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        if isinstance(other, HomogeneousPolynomial):
            self._check_compatible(other)
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            if self.degree != other.degree:
                raise ValueError("cannot add homogeneous polynomials of different degree")
            terms = dict(self.terms)
            for k, v in other.terms.items():
                terms[k] = _coefficient_sum(terms[k], v) if k in terms else v
            return HomogeneousPolynomial(self.dimension, self.degree, terms)
        if is_exact_zero(normalize_coefficient(other)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, HomogeneousPolynomial) and other.is_zero():
            return self
        return self + (-other)

    def scale(self, factor):
        factor = normalize_coefficient(factor)
        return HomogeneousPolynomial(
            self.dimension, self.degree,
            {k: _coefficient_product(v, factor) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomogeneousPolynomial):
            self._check_compatible(other)
            terms = {}
            for (ka, va), (kb, vb) in itertools.product(self.terms.items(), other.terms.items()):
                k = tuple(a + b for a, b in zip(ka, kb))
                v = _coefficient_product(va, vb)
                terms[k] = _coefficient_sum(terms[k], v) if k in terms else v
            return HomogeneousPolynomial(self.dimension, self.degree + other.degree, terms)
        if isinstance(other, (Number, Fraction, sp.Basic, np.number)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, power: int):
        out = HomogeneousPolynomial.constant(self.dimension)
        for _ in range(int(power)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        if self.dimension != other.dimension:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and (self - other).is_zero()

    def __hash__(self):
        return hash((self.dimension, self.degree, tuple(sorted(self.terms))))

    def __repr__(self):
        return f"HomogeneousPolynomial({self.dimension}, {self.degree}, {self.to_string()})"

    def to_string(self, names=None) -> str:
        names = names or ["x1", "x2", "x3"][: self.dimension]
        if self.is_zero():
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, exps) if e)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # -- calculus -------------------------------------------------------
    def derivative(self, index: int):
        terms = {}
        for exps, c in self.terms.items():
            e = exps[index]
            if e == 0:
                continue
            new = list(exps)
            new[index] -= 1
            terms[tuple(new)] = _coefficient_product(c, e)
        return HomogeneousPolynomial(self.dimension, max(self.degree - 1, 0), terms)

    def laplacian(self):
        """Exact Laplacian; the zero polynomial for degree below 2."""
        terms = {}
        for exps, c in self.terms.items():
            for i, e in enumerate(exps):
                if e < 2:
                    continue
                new = list(exps)
                new[i] -= 2
                new = tuple(new)
                v = _coefficient_product(c, e * (e - 1))
                terms[new] = _coefficient_sum(terms[new], v) if new in terms else v
        return HomogeneousPolynomial(self.dimension, max(self.degree - 2, 0), terms)

    def bilaplacian(self):
        return self.laplacian().laplacian()

    def gradient(self):
        return [self.derivative(i) for i in range(self.dimension)]

    # -- evaluation -----------------------------------------------------
    def evaluate(self, *coords):
        """Evaluate at coordinates (numbers, numpy arrays or sympy values).

        Exact coefficients are converted to floats for numpy input and to
        sympy numbers for sympy input.
        """
        if len(coords) == 1 and self.dimension > 1:
            coords = tuple(coords[0])
        if len(coords) != self.dimension:
            raise ValueError("wrong number of coordinates")
        symbolic = any(isinstance(c, sp.Basic) for c in coords)
        total = 0
        for exps, c in self.terms.items():
            if symbolic:
                coef = _to_sympy(c)
            elif isinstance(c, Fraction):
                coef = c.numerator / c.denominator
            elif isinstance(c, sp.Basic):
                coef = complex(c)
                coef = coef.real if coef.imag == 0 else coef
            else:
                coef = c
            term = coef
            for x, e in zip(coords, exps):
                if e:
                    term = term * x ** e
            total = total + term
        if symbolic:
            return sp.expand(total)
        if isinstance(total, int) and not self.terms:
            shape = np.broadcast(*[np.asarray(c) for c in coords]).shape
            return np.zeros(shape) if shape else 0.0
        return total

    def evaluate_exact(self, *coords):
        """Evaluate with sympy arithmetic and return a simplified exact value."""
        coords = tuple(_to_sympy(normalize_coefficient(c)) for c in coords)
        return sp.simplify(self.evaluate(*coords))

    def map_coefficients(self, fn):
        return HomogeneousPolynomial(self.dimension, self.degree,
                                     {k: fn(v) for k, v in self.terms.items()})

    def real_part(self):
        return self.map_coefficients(
            lambda c: sp.re(_to_sympy(c)) if isinstance(c, (sp.Basic, Fraction))
            else complex(c).real)

    def imag_part(self):
        return self.map_coefficients(
            lambda c: sp.im(_to_sympy(c)) if isinstance(c, (sp.Basic, Fraction))
            else complex(c).imag)

    def to_float(self):
        def conv(c):
            if isinstance(c, Fraction):
                return c.numerator / c.denominator
            if isinstance(c, sp.Basic):
                z = complex(c)
                return z.real if z.imag == 0 else z
            return c
        return self.map_coefficients(conv)

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            if isinstance(c, Fraction):
                terms.append([list(exps), str(c.numerator), str(c.denominator)])
            elif isinstance(c, sp.Basic):
                terms.append([list(exps), {"exact": sp.srepr(c), "text": str(c)}])
            else:
                z = complex(c)
                terms.append([list(exps), {"re": z.real, "im": z.imag}])
        return {"dimension": self.dimension, "degree": self.degree, "terms": terms}

    @classmethod
    def from_json(cls, doc: Mapping) -> "HomogeneousPolynomial":
        terms = {}
        for entry in doc["terms"]:
            exps = tuple(entry[0])
            if len(entry) == 3:
                terms[exps] = Fraction(int(entry[1]), int(entry[2]))
            else:
                payload = entry[1]
                if "exact" in payload:
                    terms[exps] = sp.sympify(payload["exact"])
                else:
                    z = complex(payload["re"], payload["im"])
                    terms[exps] = z.real if z.imag == 0 else z
        return cls(int(doc["dimension"]), int(doc["degree"]), terms)


def legendre_coefficients(n: int) -> list[Fraction]:
    """Exact power-basis coefficients of the Legendre polynomial ``P_n``."""
    prev = [Fraction(1)]
    if n == 0:
        return prev
    cur = [Fraction(0), Fraction(1)]
    for k in range(1, n):
        nxt = [Fraction(0)] * (k + 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += Fraction(2 * k + 1, k + 1) * c
        for i, c in enumerate(prev):
            nxt[i] -= Fraction(k, k + 1) * c
        prev, cur = cur, nxt
    return cur


def polynomial_derivative(coeffs: Iterable[Fraction], times: int = 1) -> list[Fraction]:
    coeffs = list(coeffs)
    for _ in range(times):
        coeffs = [c * i for i, c in enumerate(coeffs)][1:] or [Fraction(0)]
    return coeffs
