"""The elliptic function field with twisted (square- and fourth-root) layers.

A function here is a finite sum over twist vectors s = (s1, s2, s3),
si in {0, 1, 2, 3}, of

    R_s(z) * (z - e1)^(s1/4) * (z - e2)^(s2/4) * (z - e3)^(s3/4),

with R_s an exact rational function (see `coeff`).  Under z = pe(x) the
si = 2 layer carries the classical half-period-antiperiodic square roots
sqrt(pe - e_i); the derivative pe' is the single component 2 * (1,1,1)-ish
twist, stored exactly as parts[(2,2,2)] = 2.  Fourth-root layers appear for
half-integer exponent tuples (their weight functions involve e.g. sqrt(pe')),
and the whole graded module is closed under multiplication and d/dx, which is
all the invariant-space machinery requires.  Single-layer divisors invert
directly; multi-layer half-twist divisors invert through the norm chain over
the three square-root generators (conjugate, multiply, recurse), which is what
Wronskian quotients of invariant-space bases produce.

d/dx acts by the chain rule through dz/dx = w with w^2 = 4(z-e1)(z-e2)(z-e3);
each derivative moves layer s to layer (s + 2) mod 4 with the overflow (z-e_i)
factors absorbed into R.

Half-period shifts x -> x + omega_i act rationally on the even layers

    z - e_i  ->  A_i / (z - e_i),          A_i = (e_i - e_j)(e_i - e_k),
    z - e_j  ->  (e_i - e_j)(z - e_k) / (z - e_i),

but on the square-root layers they produce constant radicals sqrt(e_i - e_j).
Those live in a small graded extension (`Radical`) over the base field with
generators I (imaginary unit), sqrt(e1-e2), sqrt(e1-e3), sqrt(e2-e3).  The
branch convention is fixed once and for all:

    sqrt(z-e_i) -> -sqrt(e_i-e_j) sqrt(e_i-e_k) / sqrt(z-e_i)
    sqrt(z-e_j) ->  sqrt(e_i-e_j) sqrt(z-e_k) / sqrt(z-e_i)     (j != i)

with sqrt(e_i - e_j) := I * sqrt(e_j - e_i) whenever i > j.  This convention
reproduces the exact shift laws of z and w and gives shift-twice equal to the
2 omega_i parity sign, which the tests check.  Fourth-root layers have no
consistent shift inside this extension (it would take fourth roots of the
e-differences) and raise ShiftObstructionError.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .coeff import (
    E1,
    E2,
    E3,
    FIELD,
    ONE,
    RING,
    Z,
    ZERO,
    e_sym,
    is_scalar,
    scalar,
    scalar_str,
)

Twist = tuple[int, int, int]

_UNTWISTED: Twist = (0, 0, 0)
_WTWIST: Twist = (2, 2, 2)


class MixedParityError(ValueError):
    """Function mixes components from different parity classes."""


class ShiftObstructionError(ValueError):
    """Half-period shift would leave the supported twisted extension."""


# ---------------------------------------------------------------------------
# radical constants sqrt(e_i - e_j) and the imaginary unit
# ---------------------------------------------------------------------------

# Radical basis exponent vectors: (I, r12, r13, r23) with
# r12^2 = e1 - e2, r13^2 = e1 - e3, r23^2 = e2 - e3, I^2 = -1.
_RSQUARES = (None, E1 - E2, E1 - E3, E2 - E3)


class Radical:
    """Element of the graded extension Q(e1,e2,z)[I, r12, r13, r23]."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[tuple[int, int, int, int], object]):
        self.parts = {k: v for k, v in parts.items() if v}

    @classmethod
    def from_plain(cls, value) -> "Radical":
        return cls({(0, 0, 0, 0): value})

    @classmethod
    def generator(cls, index: int, coeff=ONE) -> "Radical":
        key = [0, 0, 0, 0]
        key[index] = 1
        return cls({tuple(key): coeff})

    @property
    def is_plain(self) -> bool:
        return all(k == (0, 0, 0, 0) for k in self.parts)

    @property
    def plain_value(self):
        if not self.is_plain:
            raise ValueError("radical part present")
        return self.parts.get((0, 0, 0, 0), ZERO)

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __add__(self, other):
        other = _promote(other)
        parts = dict(self.parts)
        for k, v in other.parts.items():
            parts[k] = parts.get(k, ZERO) + v
        return Radical(parts)

    __radd__ = __add__

    def __neg__(self):
        return Radical({k: -v for k, v in self.parts.items()})

    def __sub__(self, other):
        return self + (-_promote(other))

    def __mul__(self, other):
        if not isinstance(other, Radical):
            if isinstance(other, (int, Fraction)):
                other = scalar(other)
            return Radical({k: v * other for k, v in self.parts.items()})
        out: dict[tuple[int, int, int, int], object] = {}
        for ka, va in self.parts.items():
            for kb, vb in other.parts.items():
                coeff = va * vb
                key = []
                for idx, (a, b) in enumerate(zip(ka, kb)):
                    tot = a + b
                    if tot >= 2:
                        tot -= 2
                        coeff = -coeff if idx == 0 else coeff * _RSQUARES[idx]
                    key.append(tot)
                key = tuple(key)
                acc = out.get(key)
                out[key] = coeff if acc is None else acc + coeff
        return Radical(out)

    __rmul__ = __mul__

    def inverse(self) -> "Radical":
        # rationalize by successive conjugation in each generator
        elt = self
        numer = Radical.from_plain(ONE)
        for idx in range(4):
            conj = Radical(
                {k: (-v if k[idx] else v) for k, v in elt.parts.items()}
            )
            numer = numer * conj
            elt = elt * conj
        if not elt.is_plain:
            raise ArithmeticError("norm chain failed to rationalize")
        return numer * (ONE / elt.plain_value)

    def zdiff(self) -> "Radical":
        return Radical({k: v.diff(Z) for k, v in self.parts.items()})

    def __eq__(self, other) -> bool:
        other = _promote(other)
        return isinstance(other, Radical) and (self - other).parts == {}

    def __repr__(self) -> str:
        if not self.parts:
            return "0"
        names = ("I", "sqrt(e1-e2)", "sqrt(e1-e3)", "sqrt(e2-e3)")
        bits = []
        for key in sorted(self.parts):
            factors = [names[i] for i, e in enumerate(key) if e]
            lead = scalar_str(self.parts[key])
            bits.append("*".join([f"({lead})"] + factors) if factors else f"({lead})")
        return " + ".join(bits)


def _promote(value) -> Radical:
    if isinstance(value, Radical):
        return value
    if isinstance(value, (int, Fraction)):
        value = scalar(value)
    return Radical.from_plain(value)


def _is_radical(value) -> bool:
    return isinstance(value, Radical)


def _vmul(a, b):
    if _is_radical(a) or _is_radical(b):
        return _promote(a) * _promote(b)
    return a * b


def _vadd(a, b):
    if _is_radical(a) or _is_radical(b):
        return _promote(a) + _promote(b)
    return a + b


def _vdiff(a):
    return a.zdiff() if _is_radical(a) else a.diff(Z)


# ---------------------------------------------------------------------------
# the twisted function module
# ---------------------------------------------------------------------------


def _zfactor(i: int, n: int):
    """(z - e_i)^n as a field element, i in 1..3."""
    return (Z - e_sym(i)) ** n


class EllipticFunction:
    """Finite twist-layer sum representing an element of the elliptic field
    (or of its fourth-root cover)."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[Twist, object]):
        cleaned = {}
        for key, value in parts.items():
            if value:
                cleaned[key] = value
        self.parts = cleaned

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "EllipticFunction":
        return cls({})

    @classmethod
    def from_rational(cls, value) -> "EllipticFunction":
        """Wrap a rational function of z (untwisted layer)."""
        if isinstance(value, (int, Fraction)):
            value = scalar(value)
        return cls({_UNTWISTED: value})

    @classmethod
    def one(cls) -> "EllipticFunction":
        return cls.from_rational(ONE)

    @classmethod
    def pe(cls) -> "EllipticFunction":
        """pe(x), i.e. the generator z."""
        return cls.from_rational(Z)

    @classmethod
    def pe_prime(cls) -> "EllipticFunction":
        """pe'(x) = 2 sqrt(z-e1) sqrt(z-e2) sqrt(z-e3)."""
        return cls({_WTWIST: scalar(2)})

    @classmethod
    def co_pe(cls, i: int) -> "EllipticFunction":
        """sqrt(pe - e_i)."""
        key = [0, 0, 0]
        key[i - 1] = 2
        return cls({tuple(key): ONE})

    @classmethod
    def quarter(cls, i: int) -> "EllipticFunction":
        """(pe - e_i)^(1/4)."""
        key = [0, 0, 0]
        key[i - 1] = 1
        return cls({tuple(key): ONE})

    @classmethod
    def weight(cls, exponents: Iterable[Fraction]) -> "EllipticFunction":
        """prod_i (z - e_i)^(a_i / 2) for half-integer-or-integer a_i,
        exponents listed for i = 1, 2, 3."""
        key = [0, 0, 0]
        value = ONE
        for idx, a in enumerate(exponents):
            quarters = Fraction(a) * 2
            if quarters.denominator != 1:
                raise ValueError("exponents must be multiples of 1/2")
            quarters = int(quarters)
            key[idx] = quarters % 4
            value = value * _zfactor(idx + 1, (quarters - key[idx]) // 4)
        return cls({tuple(key): value})

    # -- ring structure ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.parts)

    @property
    def is_zero(self) -> bool:
        return not self.parts

    def __add__(self, other: "EllipticFunction") -> "EllipticFunction":
        parts = dict(self.parts)
        for key, value in other.parts.items():
            if key in parts:
                parts[key] = _vadd(parts[key], value)
            else:
                parts[key] = value
        return EllipticFunction(parts)

    def __sub__(self, other: "EllipticFunction") -> "EllipticFunction":
        return self + (-other)

    def __neg__(self) -> "EllipticFunction":
        return EllipticFunction({k: -v for k, v in self.parts.items()})

    def scale(self, c) -> "EllipticFunction":
        """Multiply by a scalar or rational function of z."""
        if isinstance(c, (int, Fraction)):
            c = scalar(c)
        return EllipticFunction({k: _vmul(v, c) for k, v in self.parts.items()})

    def __mul__(self, other: "EllipticFunction") -> "EllipticFunction":
        if not isinstance(other, EllipticFunction):
            return self.scale(other)
        out: dict[Twist, object] = {}
        for s, R in self.parts.items():
            for t, S in other.parts.items():
                coeff = _vmul(R, S)
                key = []
                for i in range(3):
                    tot = s[i] + t[i]
                    key.append(tot % 4)
                    carry = tot // 4
                    if carry:
                        coeff = _vmul(coeff, _zfactor(i + 1, carry))
                key = tuple(key)
                acc = out.get(key)
                out[key] = coeff if acc is None else _vadd(acc, coeff)
        return EllipticFunction(out)

    __rmul__ = scale

    def __pow__(self, n: int) -> "EllipticFunction":
        if n < 0:
            return (self**-n).inverse()
        out = EllipticFunction.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def conjugated(self, i: int) -> "EllipticFunction":
        """Negate the layers carrying sqrt(z - e_i); half-twist layers only."""
        out = {}
        for s, value in self.parts.items():
            if s[i - 1] % 2:
                raise ValueError("no conjugation on fourth-root layers")
            out[s] = -value if s[i - 1] == 2 else value
        return EllipticFunction(out)

    def inverse(self) -> "EllipticFunction":
        if not self.parts:
            raise ZeroDivisionError("inverse of the zero function")
        if len(self.parts) == 1:
            (twist, value), = self.parts.items()
            if _is_radical(value):
                inv = value.inverse()
            else:
                inv = ONE / value
            key = []
            for i in range(3):
                key.append((4 - twist[i]) % 4)
                if twist[i]:
                    inv = _vmul(inv, ONE / _zfactor(i + 1, 1))
            return EllipticFunction({tuple(key): inv})
        # norm chain over the three square-root generators: multiplying by
        # the partial conjugates pushes the function down to the rational
        # layer, where inversion is plain field arithmetic
        if self.has_radical_scalars():
            raise ValueError("cannot invert multi-layer functions with radical scalars")
        cofactor = EllipticFunction.one()
        cur = self
        for i in (1, 2, 3):
            conj = cur.conjugated(i)
            cofactor = cofactor * conj
            cur = cur * conj
        norm = cur.rational_part()
        if not norm:
            raise ZeroDivisionError("inverse of the zero function")
        return cofactor.scale(ONE / norm)

    def __truediv__(self, other: "EllipticFunction") -> "EllipticFunction":
        if not isinstance(other, EllipticFunction):
            if isinstance(other, (int, Fraction)):
                other = scalar(other)
            return self.scale(ONE / other)
        return self * other.inverse()

    def __eq__(self, other) -> bool:
        if not isinstance(other, EllipticFunction):
            return NotImplemented
        return (self - other).is_zero

    # -- calculus ------------------------------------------------------------

    def derivative(self) -> "EllipticFunction":
        """d/dx under z = pe(x)."""
        out: dict[Twist, object] = {}
        for s, R in self.parts.items():
            # w * layer(s) = 2 * prod (z-e_i)^((s_i+2)//4) * layer((s+2)%4)
            value = _vdiff(R)
            for i in range(3):
                if s[i]:
                    value = _vadd(value, _vmul(R, scalar(Fraction(s[i], 4)) / _zfactor(i + 1, 1)))
            value = _vmul(value, scalar(2))
            key = []
            for i in range(3):
                key.append((s[i] + 2) % 4)
                if (s[i] + 2) // 4:
                    value = _vmul(value, _zfactor(i + 1, 1))
            key = tuple(key)
            acc = out.get(key)
            out[key] = value if acc is None else _vadd(acc, value)
        return EllipticFunction(out)

    # -- structure queries ----------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return all(k == _UNTWISTED for k in self.parts)

    def rational_part(self):
        if not self.is_rational:
            raise ValueError("function has twisted layers")
        return self.parts.get(_UNTWISTED, ZERO)

    def constant_value(self):
        """The function as a coefficient scalar, when it is one."""
        value = self.rational_part()
        if _is_radical(value):
            value = value.plain_value
        if not is_scalar(value):
            raise ValueError("function depends on x")
        return value

    def w_pair(self):
        """Decompose as R0(z) + R1(z) * w; error on other layers."""
        r0 = self.parts.get(_UNTWISTED, ZERO)
        r1 = self.parts.get(_WTWIST, ZERO)
        if len(self.parts) - (_UNTWISTED in self.parts) - (_WTWIST in self.parts):
            raise ValueError("function is not in the rank-2 subfield")
        if _is_radical(r0) or _is_radical(r1):
            raise ValueError("radical scalars present")
        return r0, r1 / 2

    def parity(self) -> tuple[int, int]:
        """Signs (eps1, eps3) under x -> x + 2 omega_1 and x -> x + 2 omega_3.

        Defined for pure half-twist layers; quarter layers and mixes of the
        four parity classes raise MixedParityError.
        """
        signs = None
        for s in self.parts:
            if any(c % 2 for c in s):
                raise MixedParityError("fourth-root layer has no +-1 parity")
            h = [c // 2 for c in s]
            cur = ((-1) ** (h[1] + h[2]), (-1) ** (h[0] + h[1]))
            if signs is None:
                signs = cur
            elif signs != cur:
                raise MixedParityError("layers from different parity classes")
        if signs is None:
            raise MixedParityError("zero function has every parity")
        return signs

    def has_radical_scalars(self) -> bool:
        return any(_is_radical(v) for v in self.parts.values())

    def demoted(self) -> "EllipticFunction":
        """Replace radical scalars that happen to be plain by field elements."""
        parts = {}
        for k, v in self.parts.items():
            if _is_radical(v) and v.is_plain:
                parts[k] = v.plain_value
            else:
                parts[k] = v
        return EllipticFunction(parts)

    # -- rendering -------------------------------------------------------------

    _QUARTER_NAMES = {1: "^(1/4)", 2: "^(1/2)", 3: "^(3/4)"}

    def text(self) -> str:
        if not self.parts:
            return "0"
        bits = []
        for key in sorted(self.parts):
            value = self.parts[key]
            lead = repr(value) if _is_radical(value) else scalar_str(value)
            factors = [f"({lead})"]
            for i, s in enumerate(key):
                if s:
                    factors.append(f"(z-e{i + 1}){self._QUARTER_NAMES[s]}")
            bits.append("*".join(factors))
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"EllipticFunction<{self.text()}>"


# ---------------------------------------------------------------------------
# classical functions and operations
# ---------------------------------------------------------------------------


def pe_shifted(i: int) -> EllipticFunction:
    """pe(x + omega_i) as a rational function of z, i in 0..3 (omega_0 = 0)."""
    if i == 0:
        return EllipticFunction.pe()
    ei = e_sym(i)
    j, k = [m for m in (1, 2, 3) if m != i]
    big_a = (ei - e_sym(j)) * (ei - e_sym(k))
    return EllipticFunction.from_rational(ei + big_a / (Z - ei))


def potential(l: Iterable[Fraction]) -> EllipticFunction:
    """sum_i l_i (l_i + 1) pe(x + omega_i) for a four-entry coupling tuple."""
    total = EllipticFunction.zero()
    for i, li in enumerate(l):
        li = Fraction(li)
        c = li * (li + 1)
        if c:
            total = total + pe_shifted(i).scale(c)
    return total


def _subs_z(value, image):
    """Substitute z -> image (a field element) into a field element."""

    def poly_at(p):
        if not p:
            return ZERO
        by_deg: dict[int, dict] = {}
        for monom, q in p.terms():
            by_deg.setdefault(monom[2], {})[(monom[0], monom[1], 0)] = q
        acc = ZERO
        prev = None
        for deg in sorted(by_deg, reverse=True):
            coeff = FIELD.field_new(RING.from_dict(by_deg[deg]))
            acc = coeff if prev is None else acc * image ** (prev - deg) + coeff
            prev = deg
        if prev:
            acc = acc * image**prev
        return acc

    return poly_at(value.numer) / poly_at(value.denom)


def _sqrt_diff(i: int, j: int) -> Radical:
    """sqrt(e_i - e_j) under the fixed branch convention."""
    lo, hi = min(i, j), max(i, j)
    index = {(1, 2): 1, (1, 3): 2, (2, 3): 3}[(lo, hi)]
    gen = Radical.generator(index)
    if i > j:
        gen = Radical.generator(0) * gen
    return gen


def _shift_generator_images(i: int):
    """Images of (z, sqrt(z-e1), sqrt(z-e2), sqrt(z-e3)) under x -> x+omega_i."""
    ei = e_sym(i)
    j, k = [m for m in (1, 2, 3) if m != i]
    big_a = (ei - e_sym(j)) * (ei - e_sym(k))
    zimg = ei + big_a / (Z - ei)
    images = {}
    inv = ONE / (Z - ei)
    # sqrt(z-e_i) -> -sqrt(e_i-e_j) sqrt(e_i-e_k) sqrt(z-e_i) / (z-e_i)
    key_i = [0, 0, 0]
    key_i[i - 1] = 2
    images[i] = EllipticFunction(
        {tuple(key_i): -(_sqrt_diff(i, j) * _sqrt_diff(i, k)) * inv}
    )
    # sqrt(z-e_j) -> sqrt(e_i-e_j) sqrt(z-e_k) sqrt(z-e_i) / (z-e_i)
    for a, b in ((j, k), (k, j)):
        key = [0, 0, 0]
        key[b - 1] = 2
        key[i - 1] = 2
        images[a] = EllipticFunction({tuple(key): _sqrt_diff(i, a) * inv})
    return zimg, images


def shift_half_period(f: EllipticFunction, i: int) -> EllipticFunction:
    """f(x + omega_i), i in 1..3, under the documented branch convention.

    Rational and w-layers shift exactly rationally; square-root layers pick
    up constant radicals sqrt(e_i - e_j) which are carried in the scalar
    extension.  Fourth-root layers raise ShiftObstructionError.
    """
    if i not in (1, 2, 3):
        raise ValueError("shift index must be 1, 2 or 3")
    zimg, images = _shift_generator_images(i)
    total = EllipticFunction.zero()
    for s, R in f.parts.items():
        if any(c % 2 for c in s):
            raise ShiftObstructionError(
                "fourth-root layers cannot be shifted within this extension"
            )
        if _is_radical(R):
            shifted = Radical({k: _subs_z(v, zimg) for k, v in R.parts.items()})
        else:
            shifted = _subs_z(R, zimg)
        term = EllipticFunction({_UNTWISTED: shifted})
        for idx in (1, 2, 3):
            if s[idx - 1] == 2:
                term = term * images[idx]
        total = total + term
    return total.demoted()
