"""Dense univariate polynomials in the spectral variable E.

Coefficients live in the z-free part of the coefficient field, i.e. they are
rational functions of e1 and e2 only.  Characteristic polynomials, spectral
curves and operator pencils are all expressed in this type; substituting a
differential operator for E happens in diffop.poly_of_operator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .coeff import ONE, ZERO, is_scalar, scalar, scalar_str


def _coerce(value):
    if isinstance(value, (int, Fraction)):
        value = scalar(value)
    if not is_scalar(value):
        raise ValueError("spectral coefficients must not involve z")
    return value


class EPoly:
    """Polynomial in E with coefficient-field scalars, stored low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [_coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls) -> "EPoly":
        return cls(())

    @classmethod
    def constant(cls, c) -> "EPoly":
        return cls((c,))

    @classmethod
    def variable(cls) -> "EPoly":
        return cls((ZERO, ONE))

    @classmethod
    def from_roots(cls, roots) -> "EPoly":
        out = cls.constant(1)
        for r in roots:
            out = out * cls((-_coerce(r), ONE))
        return out

    # -- basic structure -----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    @property
    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == ONE

    def __eq__(self, other) -> bool:
        if not isinstance(other, EPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "EPoly") -> "EPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return EPoly(out)

    def __sub__(self, other: "EPoly") -> "EPoly":
        return self + (-other)

    def __neg__(self) -> "EPoly":
        return EPoly([-c for c in self.coeffs])

    def scale(self, c) -> "EPoly":
        c = _coerce(c)
        return EPoly([c * a for a in self.coeffs])

    def __mul__(self, other: "EPoly") -> "EPoly":
        if not self.coeffs or not other.coeffs:
            return EPoly.zero()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return EPoly(out)

    def __pow__(self, n: int) -> "EPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = EPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift_up(self, k: int) -> "EPoly":
        """Multiply by E^k."""
        if not self.coeffs:
            return self
        return EPoly((ZERO,) * k + self.coeffs)

    def divmod(self, other: "EPoly") -> tuple["EPoly", "EPoly"]:
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dn = other.degree
        lead = other.leading
        quo = [ZERO] * max(len(rem) - dn, 0)
        for k in range(len(rem) - dn - 1, -1, -1):
            c = rem[k + dn] / lead
            if c:
                quo[k] = c
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return EPoly(quo), EPoly(rem[:dn])

    def __floordiv__(self, other: "EPoly") -> "EPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "EPoly") -> "EPoly":
        return self.divmod(other)[1]

    def exact_div(self, other: "EPoly") -> "EPoly":
        quo, rem = self.divmod(other)
        if rem:
            raise ValueError("division is not exact")
        return quo

    def monic(self) -> "EPoly":
        if not self.coeffs:
            return self
        lead = self.leading
        return EPoly([c / lead for c in self.coeffs])

    def gcd(self, other: "EPoly") -> "EPoly":
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic() if a else a

    def derivative(self) -> "EPoly":
        return EPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, value):
        """Horner evaluation; the argument may involve z or be numeric."""
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * value + c
        return acc if acc is not None else ZERO

    # -- rendering -----------------------------------------------------------

    def text(self) -> str:
        """Canonical string, low degree first, zero terms skipped."""
        if not self.coeffs:
            return "0"
        pieces = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = scalar_str(c)
            if k == 0:
                term = cs
            else:
                power = "E" if k == 1 else f"E^{k}"
                if cs == "1":
                    term = power
                elif cs == "-1":
                    term = f"-{power}"
                elif any(ch in cs[1:] for ch in "+-") or "/" in cs or "*" in cs:
                    term = f"({cs})*{power}"
                else:
                    term = f"{cs}*{power}"
            if pieces and not term.startswith("-"):
                pieces.append("+")
            pieces.append(term)
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"EPoly<{self.text()}>"
