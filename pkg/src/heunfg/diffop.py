"""Differential operators in d/dx with elliptic-function coefficients.

An operator is a finite sum c_k(x) (d/dx)^k acting on functions of x; the
coefficients are EllipticFunction values, so composition only needs the
exact derivative from the field layer.  Equality is coefficientwise after
reduction, which is unambiguous because coefficients always multiply from
the left.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .coeff import scalar
from .efield import EllipticFunction
from .epoly import EPoly

_binomial_rows: list[list[int]] = [[1]]


def _binomials(n: int) -> list[int]:
    while len(_binomial_rows) <= n:
        prev = _binomial_rows[-1]
        _binomial_rows.append(
            [1] + [prev[k] + prev[k + 1] for k in range(len(prev) - 1)] + [1]
        )
    return _binomial_rows[n]


class DiffOperator:
    """Ordinary differential operator, coefficients stored low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[EllipticFunction]):
        cs = list(coeffs)
        while cs and cs[-1].is_zero:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls) -> "DiffOperator":
        return cls(())

    @classmethod
    def identity(cls) -> "DiffOperator":
        return cls((EllipticFunction.one(),))

    @classmethod
    def d_dx(cls, n: int = 1) -> "DiffOperator":
        return cls((EllipticFunction.zero(),) * n + (EllipticFunction.one(),))

    @classmethod
    def multiplication(cls, f: EllipticFunction) -> "DiffOperator":
        return cls((f,))

    # -- structure -----------------------------------------------------------

    @property
    def order(self) -> int:
        """Order of the operator; -1 flags the zero operator."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> EllipticFunction:
        if not self.coeffs:
            raise ValueError("zero operator has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == EllipticFunction.one()

    def coefficient(self, k: int) -> EllipticFunction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return EllipticFunction.zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(len(self.coeffs))

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return DiffOperator(out)

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator([-c for c in self.coeffs])

    def scale(self, c) -> "DiffOperator":
        if isinstance(c, (int, Fraction)):
            c = scalar(c)
        return DiffOperator([f.scale(c) for f in self.coeffs])

    def scale_fn(self, f: EllipticFunction) -> "DiffOperator":
        return DiffOperator([f * c for c in self.coeffs])

    # -- composition and application ------------------------------------------

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """self applied after other, expanded by the Leibniz rule."""
        if self.is_zero or other.is_zero:
            return DiffOperator.zero()
        # derivatives of the right factor's coefficients, up to our order
        m = self.order
        derivs = [list(other.coeffs)]
        for _ in range(m):
            derivs.append([g.derivative() for g in derivs[-1]])
        out = [EllipticFunction.zero()] * (m + other.order + 1)
        for k, f in enumerate(self.coeffs):
            if f.is_zero:
                continue
            row = _binomials(k)
            for j in range(k + 1):
                fj = f.scale(row[j]) if j else f
                for n, g in enumerate(derivs[j]):
                    if not g.is_zero:
                        out[n + k - j] = out[n + k - j] + fj * g
        return DiffOperator(out)

    def __mul__(self, other: "DiffOperator") -> "DiffOperator":
        return self.compose(other)

    def __pow__(self, n: int) -> "DiffOperator":
        if n < 0:
            raise ValueError("operators have no inverses here")
        result = DiffOperator.identity()
        for _ in range(n):
            result = result.compose(self)
        return result

    def apply(self, f: EllipticFunction) -> EllipticFunction:
        total = EllipticFunction.zero()
        df = f
        for k, c in enumerate(self.coeffs):
            if not c.is_zero:
                total = total + c * df
            if k < len(self.coeffs) - 1:
                df = df.derivative()
        return total

    # -- rendering -----------------------------------------------------------

    def text(self) -> str:
        if not self.coeffs:
            return "0"
        bits = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero:
                continue
            ct = c.text()
            if " + " in ct:
                ct = f"({ct})"
            if k == 0:
                bits.append(ct)
            elif k == 1:
                bits.append(f"{ct}*D")
            else:
                bits.append(f"{ct}*D^{k}")
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"DiffOperator<order {self.order}>"


def commutator(a: DiffOperator, b: DiffOperator) -> DiffOperator:
    return a.compose(b) - b.compose(a)


def heun_operator(l) -> DiffOperator:
    """-d^2/dx^2 plus the four-coupling elliptic potential."""
    from .efield import potential

    return DiffOperator(
        (potential(l), EllipticFunction.zero(), -EllipticFunction.one())
    )


def poly_of_operator(p: EPoly, h: DiffOperator) -> DiffOperator:
    """Horner substitution of an operator for the spectral variable."""
    result = DiffOperator.zero()
    for c in reversed(p.coeffs):
        result = result.compose(h)
        if c:
            result = result + DiffOperator.multiplication(
                EllipticFunction.from_rational(c)
            )
    return result
