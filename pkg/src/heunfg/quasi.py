"""Finite invariant spaces of the four-coupling elliptic Schroedinger operator.

A coupling tuple l selects the potential sum l_i(l_i+1) pe(x + omega_i); when
the couplings are all integers or all half-integers, the operator preserves
finite-dimensional spaces of the shape

    V_alpha = span{ prod_i (z - e_i)^(alpha_i/2) * (z - e_2)^r : r = 0..d },

one space per weight tuple alpha with alpha_i in {-l_i, l_i + 1} and
d = -sum(alpha)/2 >= 0.  On the (z - e_2)-power basis the action is exactly
tridiagonal with closed-form entries, which gives the characteristic
polynomial by a three-term recurrence; every matrix here is also rebuilt by
literally applying the operator and re-expanding, so the formulas never go
unchecked.  The module also enumerates the spaces belonging to a coupling
tuple, sums their dimensions into the spectral-curve genus, multiplies their
characteristic polynomials into the full spectral polynomial, and decides
containment between spaces of half-integer weight.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .coeff import E1, E2, FIELD, ONE, RING, ZERO, Z, scalar
from .darboux import AlphaTuple, InvalidAlphaError, canonical_couplings
from .diffop import heun_operator
from .efield import EllipticFunction
from .epoly import EPoly

E3 = -E1 - E2


class MixedCouplingError(ValueError):
    """Coupling tuple mixing integer and half-integer entries."""


class ParamTuple:
    """Canonical coupling tuple (l0, l1, l2, l3) of one parity class.

    Entries are brought to the representative with l >= -1/2 (the potential
    only sees l(l+1)); a mix of integer and half-integer entries is refused
    because the space enumeration differs fundamentally between the classes.
    """

    __slots__ = ("entries",)

    def __init__(self, values: Iterable):
        entries = canonical_couplings(values)
        if len(entries) != 4:
            raise ValueError("need exactly four couplings")
        shown = "({})".format(", ".join(str(v) for v in entries))
        denoms = {v.denominator for v in entries}
        if not denoms <= {1, 2}:
            raise ValueError(f"couplings {shown} are not half-integers")
        if len(denoms) != 1:
            raise MixedCouplingError(
                f"couplings {shown} mix integer and half-integer entries"
            )
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("ParamTuple is immutable")

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def __len__(self) -> int:
        return 4

    def __eq__(self, other) -> bool:
        return isinstance(other, ParamTuple) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return "ParamTuple(({}))".format(", ".join(str(v) for v in self.entries))

    @property
    def parity(self) -> str:
        return "integer" if self.entries[0].denominator == 1 else "half-integer"

    def n_values(self) -> tuple[int, ...]:
        """The shifted couplings n_i = l_i + 1/2 of the half-integer class."""
        if self.parity != "half-integer":
            raise ValueError("n-values are defined for half-integer couplings")
        return tuple(int(v + Fraction(1, 2)) for v in self.entries)


def invariant_basis(alpha: AlphaTuple) -> list[EllipticFunction]:
    """The d+1 functions prod(z - e_i)^(alpha_i/2) * (z - e_2)^r."""
    if alpha.d < 0:
        raise InvalidAlphaError(
            f"weight tuple {alpha.entries} has d < 0; the space is empty"
        )
    return [
        EllipticFunction.weight([alpha[1], alpha[2] + 2 * r, alpha[3]])
        for r in range(alpha.d + 1)
    ]


def _shift_down(r, alpha: AlphaTuple):
    """a_{r+1,r}: coefficient of v_{r+1} in H v_r."""
    return -4 * (scalar(r + alpha.gamma1)) * scalar(r + alpha.gamma2)


def _shift_up(r, alpha: AlphaTuple):
    """a_{r-1,r}: coefficient of v_{r-1} in H v_r."""
    return (
        -4 * scalar(r) * scalar(r + alpha[2] - Fraction(1, 2))
        * (E2 - E3) * (E2 - E1)
    )


def _diagonal(r, alpha: AlphaTuple):
    """a_{r,r}: coefficient of v_r in H v_r."""
    a0, a1, a2, a3 = alpha.entries
    return (
        -4 * scalar(r) * (
            (E2 - E3) * scalar(r + a2 + a1) + (E2 - E1) * scalar(r + a2 + a3)
        )
        - 4 * E2 * scalar(alpha.gamma1) * scalar(alpha.gamma2)
        + E1 * scalar((a2 + a3) ** 2)
        + E2 * scalar((a1 + a3) ** 2)
        + E3 * scalar((a1 + a2) ** 2)
    )


@dataclass(frozen=True)
class TridiagonalAction:
    """Matrix of the operator on the v_r basis, stored by diagonals.

    ``down[r]`` is the coefficient of v_{r+1} in the image of v_r, ``up[r]``
    the coefficient of v_r in the image of v_{r+1}.
    """

    diag: tuple
    down: tuple
    up: tuple

    @property
    def dimension(self) -> int:
        return len(self.diag)

    def dense(self) -> list[list]:
        n = self.dimension
        out = [[ZERO for _ in range(n)] for _ in range(n)]
        for r in range(n):
            out[r][r] = self.diag[r]
        for r in range(n - 1):
            out[r + 1][r] = self.down[r]
            out[r][r + 1] = self.up[r]
        return out

    def char_poly(self) -> EPoly:
        """det(E - M) through the three-term principal-minor recurrence."""
        prev = EPoly.constant(ONE)
        cur = EPoly.variable() - EPoly.constant(self.diag[0])
        for r in range(1, self.dimension):
            step = (EPoly.variable() - EPoly.constant(self.diag[r])) * cur
            cross = self.down[r - 1] * self.up[r - 1]
            nxt = step - prev.scale(cross)
            prev, cur = cur, nxt
        return cur


def action_matrix(alpha: AlphaTuple) -> TridiagonalAction:
    """Tridiagonal matrix of the coupled operator on invariant_basis(alpha)."""
    if alpha.d < 0:
        raise InvalidAlphaError(
            f"weight tuple {alpha.entries} has d < 0; the space is empty"
        )
    d = alpha.d
    return TridiagonalAction(
        diag=tuple(_diagonal(r, alpha) for r in range(d + 1)),
        down=tuple(_shift_down(r, alpha) for r in range(d)),
        up=tuple(_shift_up(r + 1, alpha) for r in range(d)),
    )


def _from_poly(p):
    return FIELD.raw_new(p, p.ring.one)


def _z_degree(p) -> int:
    return max((m[2] for m in p.monoms()), default=-1)


def _as_z_polynomial(value) -> list:
    """Coefficients of a z-polynomial field element, low degree first.

    The denominator may depend on e1, e2 but not on z; anything else is a
    genuine failure of polynomiality and raises.
    """
    num, den = value.numer, value.denom
    if _z_degree(den) > 0:
        raise ValueError("field element is not polynomial in z")
    scale = _from_poly(den)
    layers: dict[int, dict] = {}
    for monom, c in num.terms():
        layers.setdefault(monom[2], {})[monom[:2] + (0,)] = c
    top = max(layers, default=-1)
    out = []
    for k in range(top + 1):
        part = layers.get(k)
        out.append(_from_poly(num.ring(part)) / scale if part else ZERO)
    return out


def _taylor_at_e2(coeffs: list) -> list:
    """Rewrite sum c_k z^k as coefficients in powers of (z - e2)."""
    work = list(coeffs)
    out = []
    while work:
        quotient = []
        rem = work[-1]
        for b in reversed(work[:-1]):
            quotient.append(rem)
            rem = b + rem * E2
        out.append(rem)
        work = list(reversed(quotient))
    return out


def action_matrix_via_apply(alpha: AlphaTuple) -> TridiagonalAction:
    """Rebuild the tridiagonal matrix by applying the operator to the basis.

    Independent route used to cross-check the closed-form entries: compute
    H v_r, strip the gauge factor v_0, expand in powers of (z - e2).
    """
    basis = invariant_basis(alpha)
    h = heun_operator(alpha.source_l())
    gauge_inverse = basis[0].inverse()
    d = alpha.d
    diag = [ZERO] * (d + 1)
    down = [ZERO] * max(d, 0)
    up = [ZERO] * max(d, 0)
    for r, v in enumerate(basis):
        image = h.apply(v) * gauge_inverse
        coeffs = _taylor_at_e2(_as_z_polynomial(image.rational_part()))
        for s, c in enumerate(coeffs):
            if not c:
                continue
            if s == r:
                diag[r] = c
            elif s == r + 1:
                down[r] = c
            elif s == r - 1:
                up[r - 1] = c
            else:
                raise ValueError(
                    f"operator image of v_{r} has a v_{s} component; "
                    "the action is not tridiagonal"
                )
    return TridiagonalAction(diag=tuple(diag), down=tuple(down), up=tuple(up))


def characteristic_polynomial(alpha: AlphaTuple) -> EPoly:
    return action_matrix(alpha).char_poly()


def preserved_dimension(alpha: AlphaTuple) -> int:
    """dim of the preserved space attached to alpha (possibly zero)."""
    half_sum = alpha.gamma1
    if half_sum <= 0:
        return int(1 - half_sum)
    if half_sum >= 2:
        return int(half_sum - 1)
    return 0


def preserved_basis(alpha: AlphaTuple) -> list[EllipticFunction]:
    """Basis of the preserved space: V of alpha, or of 1 - alpha, or empty.

    Mirrors the selector branches: the weight tuple with nonnegative d gives
    the space the associated intertwiner annihilates.
    """
    half_sum = alpha.gamma1
    if half_sum <= 0:
        return invariant_basis(alpha)
    if half_sum >= 2:
        return invariant_basis(alpha.complement())
    return []


def selected_char_poly(alpha: AlphaTuple) -> EPoly:
    """Characteristic polynomial on the preserved space (1 when empty)."""
    half_sum = alpha.gamma1
    if half_sum <= 0:
        return characteristic_polynomial(alpha)
    if half_sum >= 2:
        return characteristic_polynomial(alpha.complement())
    return EPoly.constant(ONE)


_HALF_SIGNS = (
    (-1, -1, -1, -1),
    (-1, -1, +1, +1),
    (-1, +1, -1, +1),
    (-1, +1, +1, -1),
    (-1, -1, -1, +1),
    (-1, -1, +1, -1),
    (-1, +1, -1, -1),
    (+1, -1, -1, -1),
)


def invariant_space_tuples(l: ParamTuple) -> list[AlphaTuple]:
    """The weight tuples whose spaces the coupled operator preserves.

    Integer couplings give four tuples (one per parity character; some may
    label empty spaces), split by the parity of sum(l).  Half-integer
    couplings give the eight nested sign patterns, largest space first, or
    nothing when sum(n) is odd.  Duplicates among the eight (when some
    n_i = 0) are kept as listed.
    """
    l0, l1, l2, l3 = l.entries
    if l.parity == "integer":
        if sum(l.entries) % 2 == 0:
            raw = [
                (-l0, -l1, -l2, -l3),
                (-l0, -l1, l2 + 1, l3 + 1),
                (-l0, l1 + 1, -l2, l3 + 1),
                (-l0, l1 + 1, l2 + 1, -l3),
            ]
        else:
            raw = [
                (-l0, -l1, -l2, l3 + 1),
                (-l0, -l1, l2 + 1, -l3),
                (-l0, l1 + 1, -l2, -l3),
                (l0 + 1, -l1, -l2, -l3),
            ]
        return [AlphaTuple(t) for t in raw]
    n = l.n_values()
    if sum(n) % 2:
        return []
    half = Fraction(1, 2)
    return [
        AlphaTuple(tuple(s * v + half for s, v in zip(signs, n)))
        for signs in _HALF_SIGNS
    ]


def space_dimension(l: ParamTuple) -> int:
    """dim of the full preserved space V for the coupling tuple.

    Integer couplings: the four spaces are independent, so dimensions add.
    Half-integer couplings: the eight spaces nest inside the all-minus one,
    whose dimension is reported (zero when no space exists).
    """
    tuples = invariant_space_tuples(l)
    if l.parity == "integer":
        return sum(preserved_dimension(a) for a in tuples)
    if not tuples:
        return 0
    return preserved_dimension(tuples[0])


def _genus_closed_form(l: ParamTuple) -> Fraction:
    k0, k1, k2, k3 = sorted((int(v) for v in l.entries), reverse=True)
    if (k0 + k1 + k2 + k3) % 2 == 0:
        if k0 + k3 >= k1 + k2:
            return Fraction(k0)
        return Fraction(k0 + k1 + k2 - k3, 2)
    if k0 >= k1 + k2 + k3 + 1:
        return Fraction(k0)
    return Fraction(k0 + k1 + k2 + k3 + 1, 2)


def genus(l: ParamTuple) -> int:
    """Arithmetic genus of the spectral curve: (dim V - 1) / 2.

    Computed from the space decomposition; the closed-form branch rule is
    evaluated alongside and must agree, so a mismatch fails loudly instead
    of shipping a wrong genus.
    """
    if l.parity != "integer":
        raise ValueError("genus is defined for integer couplings only")
    dim = space_dimension(l)
    g, rem = divmod(dim - 1, 2)
    if rem:
        raise ArithmeticError(f"space dimension {dim} is even for l={l}")
    if _genus_closed_form(l) != g:
        raise ArithmeticError(
            f"genus branch rule gives {_genus_closed_form(l)}, decomposition gives {g}"
        )
    return g


def full_char_poly(l: ParamTuple) -> EPoly:
    """The spectral polynomial: product of block characteristic polynomials.

    Integer couplings multiply the polynomials of the four preserved spaces
    (degree 2*genus + 1).  Half-integer couplings report the maximal space's
    polynomial; with sum(n) odd there is no space at all.
    """
    tuples = invariant_space_tuples(l)
    if l.parity == "half-integer":
        if not tuples:
            raise ValueError(f"couplings {tuple(l)} preserve no space")
        return characteristic_polynomial(tuples[0])
    out = EPoly.constant(ONE)
    for a in tuples:
        out = out * selected_char_poly(a)
    assert out.is_monic and out.degree == 2 * genus(l) + 1
    return out


def transpose_check(alpha: AlphaTuple) -> bool:
    """Duality between the action on alpha and on -alpha - d.

    Checks the characteristic polynomials agree and that the reversal
    u_r = (-1)^r binom(d, r) v_{d-r} carries one matrix to the other's
    transpose, entry by entry.
    """
    dual = alpha.dual()
    if characteristic_polynomial(alpha) != characteristic_polynomial(dual):
        return False
    d = alpha.d
    m = action_matrix(alpha).dense()
    n = action_matrix(dual).dense()
    t = [Fraction((-1) ** r * math.comb(d, r)) for r in range(d + 1)]
    for r in range(d + 1):
        for s in range(d + 1):
            lhs = m[d - s][d - r] * scalar(t[r] / t[s])
            if lhs != n[r][s]:
                return False
    return True


def subspace_inclusion(alpha: AlphaTuple, beta: AlphaTuple) -> bool:
    """Whether V_beta is contained in V_alpha, by exact division.

    Each basis element of V_beta is divided by the gauge factor of V_alpha;
    containment means every quotient is a z-polynomial of degree at most
    alpha.d (denominators in e1, e2 alone are harmless scalars).
    """
    if alpha.d < 0 or beta.d < 0:
        raise InvalidAlphaError("inclusion is defined for nonempty spaces")
    gauge_inverse = EllipticFunction.weight(
        [alpha[1], alpha[2], alpha[3]]
    ).inverse()
    for b in invariant_basis(beta):
        q = b * gauge_inverse
        if not q.is_rational:
            return False
        value = q.rational_part()
        if _z_degree(value.denom) > 0:
            return False
        if _z_degree(value.numer) > alpha.d:
            return False
    return True
