"""Exact scalar arithmetic over the half-period value field Q(e1, e2).

All symbolic computation in this package happens over the rational function
field Q(e1, e2, z).  The symbols e1 and e2 are the first two critical values
of the Weierstrass pe-function; the third is eliminated everywhere through
e1 + e2 + e3 = 0, so identities such as g2 = -4(e1 e2 + e2 e3 + e3 e1) come
out as honest polynomial identities in two variables.  The generator z plays
the role of pe(x) once elliptic functions enter (see `efield`); a "scalar" is
simply a z-free element.

The backing implementation is sympy's sparse polynomial fraction field, which
gives exact rational arithmetic with automatic gcd reduction and a canonical
denominator sign.  This module pins the parts the rest of the package relies
on: the shared field instance, constructors, degree/freeness predicates, the
canonical serialization (degree-lexicographic monomial order, e1 before e2,
"num/den" with a reduced fraction), and numeric instantiation at a lattice
point given by a nome.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement
from sympy.polys.fields import field as _field

FIELD, E1, E2, Z = _field("e1,e2,z", QQ)
RING = FIELD.ring
_GENS = RING.gens
_ZGEN = _GENS[2]

E3 = -E1 - E2

#: q-expansion coefficients beyond this degree are never needed by callers.
DEFAULT_NOME_ORDER = 8

Rationalish = Union[int, Fraction]


class DegeneratePointError(ValueError):
    """Numeric lattice point with all critical values collapsed."""


class PoleError(ZeroDivisionError):
    """Numeric instantiation hit a zero denominator."""


def scalar(value) -> FracElement:
    """Coerce an int, Fraction or field element into the coefficient field."""
    if isinstance(value, FracElement):
        return value
    if isinstance(value, Fraction):
        return FIELD(QQ(value.numerator, value.denominator))
    return FIELD(QQ(value))


ZERO = FIELD.zero
ONE = FIELD.one


def is_scalar(f) -> bool:
    """True when f does not involve z (i.e. it is a coefficient scalar)."""
    return f.numer.degree(_ZGEN) <= 0 and f.denom.degree(_ZGEN) <= 0


def is_rational_number(f) -> bool:
    """True when f is free of e1, e2 and z."""
    return all(m == (0, 0, 0) for m in f.numer.monoms()) and all(
        m == (0, 0, 0) for m in f.denom.monoms()
    )


def as_fraction(f) -> Fraction:
    """Convert a symbol-free field element to a Fraction."""
    if not is_rational_number(f):
        raise ValueError(f"not a rational constant: {f}")
    num = f.numer.get((0, 0, 0), QQ(0))
    den = f.denom.get((0, 0, 0), QQ(1))
    return Fraction(int(num.numerator) * int(den.denominator),
                    int(num.denominator) * int(den.numerator))


def g2() -> FracElement:
    """Quartic lattice invariant, -4(e1 e2 + e2 e3 + e3 e1)."""
    return -4 * (E1 * E2 + E2 * E3 + E3 * E1)


def g3() -> FracElement:
    """Cubic lattice invariant, 4 e1 e2 e3."""
    return 4 * E1 * E2 * E3


def e_sym(i: int) -> FracElement:
    """Critical value e_i for i in {1, 2, 3} (e3 expanded)."""
    return (E1, E2, E3)[i - 1]


# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------


def _monom_key(monom):
    # degree-lex: total degree first, then exponents with e1 weighted
    # heaviest.  Sorting descending puts the leading monomial first.
    return (sum(monom), monom)


def _poly_str(p) -> str:
    if not p:
        return "0"
    pieces = []
    names = ("e1", "e2", "z")
    for monom, q in sorted(p.terms(), key=lambda t: _monom_key(t[0]), reverse=True):
        factors = []
        for name, exp in zip(names, monom):
            if exp == 1:
                factors.append(name)
            elif exp > 1:
                factors.append(f"{name}^{exp}")
        num, den = int(q.numerator), int(q.denominator)
        sign = "-" if num < 0 else ("" if not pieces else "+")
        mag = abs(num)
        if factors and mag == 1 and den == 1:
            body = "*".join(factors)
        else:
            coeff = str(mag) if den == 1 else f"{mag}/{den}"
            body = coeff + "*" + "*".join(factors) if factors else coeff
        pieces.append(sign + body)
    return "".join(pieces)


def scalar_str(f) -> str:
    """Canonical string for a field element: reduced num/den, degree-lex
    monomials with e1 before e2 (and z last), deterministic byte-for-byte."""
    num, den = _poly_str(f.numer), _poly_str(f.denom)
    if den == "1":
        return num
    if "+" in num[1:] or "-" in num[1:]:
        num = f"({num})"
    if "+" in den[1:] or "-" in den[1:] or "*" in den or "^" in den:
        den = f"({den})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------------
# numeric lattice points
# ---------------------------------------------------------------------------


def _theta_fourth_series(order: int) -> tuple[list[Fraction], list[Fraction], list[Fraction]]:
    """Integer q-series (as Fractions) of theta2^4, theta3^4, theta4^4 through
    degree `order` in the nome."""

    def trunc_mul(a, b):
        out = [0] * (order + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if i + j > order:
                    break
                out[i + j] += ai * bj
        return out

    def fourth(a):
        sq = trunc_mul(a, a)
        return trunc_mul(sq, sq)

    th3 = [0] * (order + 1)
    th4 = [0] * (order + 1)
    th3[0] = th4[0] = 1
    n = 1
    while n * n <= order:
        th3[n * n] = 2
        th4[n * n] = 2 * (-1) ** n
        n += 1
    # theta2 = 2 q^(1/4) sum q^(n(n+1)); the quarter powers drop out of the
    # fourth power, leaving 16 q (sum)^4.
    inner = [0] * (order + 1)
    n = 0
    while n * (n + 1) <= order:
        inner[n * (n + 1)] = 1
        n += 1
    th2_4 = [0] * (order + 1)
    for i, c in enumerate(fourth(inner)):
        if i + 1 <= order:
            th2_4[i + 1] = 16 * c
    return (
        [Fraction(c) for c in th2_4],
        [Fraction(c) for c in fourth(th3)],
        [Fraction(c) for c in fourth(th4)],
    )


def _horner(coeffs: list[Fraction], p: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * p + complex(c)
    return acc


@dataclass(frozen=True)
class NumericPoint:
    """Numeric critical values (e1, e2, e3) of a concrete lattice.

    Always satisfies e1 + e2 + e3 = 0 to within 1e-12 of the largest entry;
    pairwise coincidences are allowed (they happen at real degenerate nomes
    and are precisely what the distinctness reports must detect).
    """

    e1: complex
    e2: complex
    e3: complex

    def __post_init__(self):
        scale = max(abs(self.e1), abs(self.e2), abs(self.e3), 1e-300)
        if abs(self.e1 + self.e2 + self.e3) > 1e-12 * scale:
            raise ValueError("critical values must sum to zero")

    @property
    def g2(self) -> complex:
        return -4 * (self.e1 * self.e2 + self.e2 * self.e3 + self.e3 * self.e1)

    @property
    def g3(self) -> complex:
        return 4 * self.e1 * self.e2 * self.e3

    @property
    def is_fully_degenerate(self) -> bool:
        scale = max(abs(self.e1), abs(self.e2), abs(self.e3))
        return scale < 1e-300

    def require_nondegenerate(self):
        if self.is_fully_degenerate:
            raise DegeneratePointError("all critical values coincide")


def numeric_from_nome(p: complex, order: int = DEFAULT_NOME_ORDER) -> NumericPoint:
    """Critical values for the lattice with periods (1, tau), nome p = e^(i pi tau).

    Truncates the theta-constant q-series at degree `order`; order 1 already
    reproduces the leading behaviour e1 = pi^2(2/3 + O(p^2)),
    e2 = pi^2(-1/3 + 8p), e3 = pi^2(-1/3 - 8p).
    """
    if abs(p) >= 1:
        raise ValueError("nome must satisfy |p| < 1")
    if order < 1:
        raise ValueError("order must be >= 1")
    th2_4, th3_4, th4_4 = _theta_fourth_series(order)
    pi2 = math.pi**2
    t2, t3, t4 = (_horner(s, complex(p)) for s in (th2_4, th3_4, th4_4))
    e1 = pi2 * (t3 + t4) / 3
    e2 = pi2 * (t2 - t4) / 3
    e3 = -pi2 * (t2 + t3) / 3
    # enforce the exact trace constraint against truncation round-off
    shift = (e1 + e2 + e3) / 3
    return NumericPoint(e1 - shift, e2 - shift, e3 - shift)


def _to_complex(q) -> complex:
    return int(q.numerator) / int(q.denominator)


def _eval_poly(p, e1: complex, e2: complex, zval: complex) -> complex:
    acc = 0j
    for (i, j, k), q in p.terms():
        acc += _to_complex(q) * e1**i * e2**j * zval**k
    return acc


def evaluate(f, point: NumericPoint, zval: complex = 0j) -> complex:
    """Instantiate a field element at a numeric point (and z value).

    Raises PoleError when the reduced denominator vanishes there.
    """
    den = _eval_poly(f.denom, point.e1, point.e2, zval)
    if abs(den) < 1e-13 * _poly_scale(f.denom, point, zval):
        raise PoleError("denominator vanishes at the requested point")
    return _eval_poly(f.numer, point.e1, point.e2, zval) / den


def _poly_scale(p, point: NumericPoint, zval: complex) -> float:
    scale = 0.0
    for (i, j, k), q in p.terms():
        scale += abs(_to_complex(q)) * abs(point.e1) ** i * abs(point.e2) ** j * abs(zval) ** k
    return max(scale, 1e-300)
