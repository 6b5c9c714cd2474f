"""Darboux-type intertwiners between elliptic Schroedinger operators.

Each operator here is labelled by a weight tuple alpha = (a0, a1, a2, a3) of
half-integers with even sum.  The tuple encodes the gauge factor

    Phi(x) = prod_i (pe(x + omega_i) - e_i)^(a_i / 2)
           = prod_{i=1..3} (z - e_i)^(a_i / 2) * (prefactor in a0),

whose logarithmic derivative enters the conjugated first-order operator

    T = (1/w) d/dx - G(z),     G = (1/2) sum_{i=1..3} a_i / (z - e_i).

Iterating T a total of d + 1 times (d = -sum(alpha)/2) and clearing the 1/w
denominators with a left factor w^(d+1) yields a monic operator of order
d + 1 that annihilates the polynomial-times-gauge invariant space attached
to alpha and intertwines the two Schroedinger operators whose coupling
tuples differ by d.  The same operator can be rebuilt from any basis of its
kernel through exact Wronskian minors; both routes are exposed so they can
be cross-checked instead of trusted.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .coeff import ZERO, Z, e_sym, scalar
from .diffop import DiffOperator, heun_operator
from .efield import EllipticFunction


class InvalidAlphaError(ValueError):
    """Weight tuple outside the admissible lattice."""


class SingularWronskianError(ValueError):
    """Linearly dependent kernel basis handed to the Wronskian route."""


def canonical_couplings(values: Iterable) -> tuple[Fraction, ...]:
    """Map each coupling l to the representative of {l, -l-1} with l >= -1/2."""
    return tuple(max(Fraction(v), -Fraction(v) - 1) for v in values)


class AlphaTuple:
    """Weight tuple (a0, a1, a2, a3), a_i in (1/2)Z, with even sum.

    The order of the induced intertwiner is d + 1 with d = -sum/2; d may be
    negative at construction (such tuples label empty invariant spaces and
    are still useful as duals), but building operators from them is refused.
    """

    __slots__ = ("entries",)

    def __init__(self, values: Iterable):
        entries = tuple(Fraction(v) for v in values)
        if len(entries) != 4:
            raise InvalidAlphaError("need exactly four weight exponents")
        for a in entries:
            if (2 * a).denominator != 1:
                raise InvalidAlphaError(f"weight exponent {a} is not a half-integer")
        total = sum(entries)
        if total.denominator != 1 or total % 2:
            raise InvalidAlphaError(
                f"weight exponents {entries} have odd sum; no integer order"
            )
        object.__setattr__(self, "entries", entries)

    # -- basic container protocol ----------------------------------------------

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def __len__(self) -> int:
        return 4

    def __eq__(self, other) -> bool:
        return isinstance(other, AlphaTuple) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return "AlphaTuple(({}))".format(", ".join(str(a) for a in self.entries))

    def __setattr__(self, name, value):
        raise AttributeError("AlphaTuple is immutable")

    # -- derived data ------------------------------------------------------------

    @property
    def d(self) -> int:
        return int(-sum(self.entries) // 2)

    @property
    def gamma1(self) -> Fraction:
        return sum(self.entries) / 2

    @property
    def gamma2(self) -> Fraction:
        a0, a1, a2, a3 = self.entries
        return (-a0 + a1 + a2 + a3 + 1) / 2

    def source_l(self) -> tuple[Fraction, ...]:
        """The canonical coupling tuple whose operator preserves this space."""
        return tuple(max(-a, a - 1) for a in self.entries)

    def dual(self) -> "AlphaTuple":
        """The tuple -alpha - d labelling the transposed action."""
        d = self.d
        return AlphaTuple(tuple(-a - d for a in self.entries))

    def complement(self) -> "AlphaTuple":
        """The tuple 1 - alpha (swaps the roots of each a(a-1) = l(l+1))."""
        return AlphaTuple(tuple(1 - a for a in self.entries))

    def is_admissible_for(self, l: Sequence) -> bool:
        couplings = [Fraction(v) for v in l]
        return all(
            a == -c or a == c + 1 for a, c in zip(self.entries, couplings)
        )


def _log_weight_fraction(alpha: AlphaTuple):
    """G(z) = (1/2) sum_{i=1..3} a_i / (z - e_i)."""
    total = ZERO
    for i in (1, 2, 3):
        a = alpha[i]
        if a:
            total = total + scalar(a) / (2 * (Z - e_sym(i)))
    return total


def darboux_operator(alpha: AlphaTuple) -> DiffOperator:
    """The monic order-(d+1) intertwiner attached to a weight tuple.

    Built as w^(d+1) * T^(d+1) with T = (1/w) d/dx - G(z); requires d >= 0.
    """
    d = alpha.d
    if d < 0:
        raise InvalidAlphaError(
            f"weight tuple {alpha.entries} has d = {d} < 0; no operator"
        )
    w = EllipticFunction.pe_prime()
    step = DiffOperator(
        (EllipticFunction.from_rational(-_log_weight_fraction(alpha)), w.inverse())
    )
    power = DiffOperator.identity()
    for _ in range(d + 1):
        power = step.compose(power)
    op = power.scale_fn(w ** (d + 1))
    assert op.is_monic and op.order == d + 1
    return op


def subleading_coefficient(alpha: AlphaTuple) -> EllipticFunction:
    """Closed form for the D^d coefficient of the order-(d+1) intertwiner."""
    d = alpha.d
    total = ZERO
    for i in (1, 2, 3):
        total = total + scalar(2 * alpha[i] + d) / (Z - e_sym(i))
    w = EllipticFunction.pe_prime()
    return w.scale(Fraction(-(d + 1), 4)) * EllipticFunction.from_rational(total)


def annihilator_from_basis(basis: Sequence[EllipticFunction]) -> DiffOperator:
    """Monic operator of order n = len(basis) with the given kernel.

    Coefficients are ratios of Wronskian-type minors: with rows the 0..n-th
    derivatives of the basis, c_k = (-1)^(k+n) * det(rows without k) / det(rows
    without n).  Minors are expanded by memoized Laplace steps along the first
    column, so shared subminors are computed once.
    """
    n = len(basis)
    if n == 0:
        return DiffOperator.identity()
    table = [list(basis)]
    for _ in range(n):
        table.append([f.derivative() for f in table[-1]])

    memo: dict[tuple[tuple[int, ...], int], EllipticFunction] = {}

    def det(rows: tuple[int, ...], col: int) -> EllipticFunction:
        if not rows:
            return EllipticFunction.one()
        key = (rows, col)
        got = memo.get(key)
        if got is not None:
            return got
        acc = EllipticFunction.zero()
        for p, r in enumerate(rows):
            entry = table[r][col]
            if entry.is_zero:
                continue
            sub = det(rows[:p] + rows[p + 1:], col + 1)
            term = entry * sub
            acc = acc + (term if p % 2 == 0 else -term)
        memo[key] = acc
        return acc

    all_rows = tuple(range(n + 1))
    minors = [det(all_rows[:k] + all_rows[k + 1:], 0) for k in range(n + 1)]
    wronskian = minors[n]
    if wronskian.is_zero:
        raise SingularWronskianError("basis has vanishing Wronskian")
    inv = wronskian.inverse()
    coeffs = []
    for k in range(n):
        c = minors[k] * inv
        coeffs.append(-c if (k + n) % 2 else c)
    coeffs.append(EllipticFunction.one())
    return DiffOperator(coeffs)


def darboux_selector(alpha: AlphaTuple) -> DiffOperator:
    """The intertwiner that is guaranteed nonzero for the given weights.

    For sum(alpha)/2 <= 0 this is the operator of alpha itself; for
    sum >= 2 the one of 1 - alpha (same intertwining relation, built from
    the complementary invariant space); the gap sum == 1 degenerates to the
    identity.
    """
    half_sum = alpha.gamma1
    if half_sum <= 0:
        return darboux_operator(alpha)
    if half_sum >= 2:
        return darboux_operator(alpha.complement())
    return DiffOperator.identity()


def intertwine_residual(l: Sequence, alpha: AlphaTuple) -> DiffOperator:
    """H^(canonical(alpha + d)) o L_alpha - L_alpha o H^(l); zero iff valid."""
    op = darboux_operator(alpha)
    d = alpha.d
    target = canonical_couplings(a + d for a in alpha)
    left = heun_operator(target).compose(op)
    right = op.compose(heun_operator(l))
    return left - right
