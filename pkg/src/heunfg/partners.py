"""Isomonodromic partner bookkeeping for the four-coupling operators.

Linking two operators here always means an exact intertwining relation
realized by a gauged derivative power (a Darboux-type factor), by a
half-period shift of the argument, or trivially by the identity.  For
integer couplings the orbit has eight members, for half-integer
couplings twelve; in both cases the last four are the source itself and
its three half-period shifts.  Each non-trivial edge stores the weight
tuple of the factor that realizes it, so the relation can be re-checked
symbolically at any time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .darboux import AlphaTuple, intertwine_residual
from .efield import potential, shift_half_period
from .quasi import ParamTuple, characteristic_polynomial

HALF = Fraction(1, 2)

# slot orders of the four dual-type members and the four shift members
_DUAL_PERMS = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))


@dataclass(frozen=True)
class Witness:
    """How a family member is reached from the source operator."""

    kind: str  # "darboux", "shift", or "identity"
    alpha: AlphaTuple | None = None
    shift: int | None = None


@dataclass(frozen=True)
class PartnerFamily:
    source: ParamTuple
    members: tuple
    self_dual: bool
    note: str | None = None


def _require_integer(l: ParamTuple) -> None:
    if l.parity != "integer":
        raise ValueError("integer couplings required")


def _sorted_descending(l: ParamTuple) -> ParamTuple:
    return ParamTuple(tuple(sorted(l, reverse=True)))


def even_dual(l: ParamTuple) -> tuple:
    """Slotwise dual couplings for an even total; raw, not canonicalized.

    Entries may be negative (for instance (2,0,0,0) maps to (-1,1,1,1));
    keeping them raw makes the arithmetic behind each witness auditable.
    """
    _require_integer(l)
    if sum(l) % 2:
        raise ValueError("even coupling sum required")
    l0, l1, l2, l3 = (int(v) for v in l)
    half_sum = (l0 + l1 + l2 + l3) // 2
    return tuple(half_sum - v for v in (l0, l1, l2, l3))


def odd_dual(l: ParamTuple) -> tuple:
    """Slotwise dual couplings for an odd total; raw, not canonicalized."""
    _require_integer(l)
    if sum(l) % 2 == 0:
        raise ValueError("odd coupling sum required")
    l0, l1, l2, l3 = (int(v) for v in l)
    s = l0 + l1 + l2 + l3
    return (
        (s + 1) // 2,
        (l0 + l1 - l2 - l3 - 1) // 2,
        (l0 - l1 + l2 - l3 - 1) // 2,
        (l0 - l1 - l2 + l3 - 1) // 2,
    )


def canonical_partner(l: ParamTuple) -> ParamTuple:
    """The sorted-descending representative of the dual operator."""
    _require_integer(l)
    s = _sorted_descending(l)
    if sum(s) % 2 == 0:
        d0, d1, d2, d3 = even_dual(s)
        return ParamTuple((d3, d2, d1, max(d0, -d0 - 1)))
    d0, d1, d2, d3 = odd_dual(s)
    return ParamTuple((d0, d1, d2, max(d3, -d3 - 1)))


def is_self_dual(l: ParamTuple) -> bool:
    """Whether the dual reproduces the operator itself.

    Expects integer couplings sorted in descending order; the closed
    conditions below are stated for that normal form only.
    """
    _require_integer(l)
    values = [int(v) for v in l]
    if values != sorted(values, reverse=True):
        raise ValueError("couplings must be sorted in descending order")
    l0, l1, l2, l3 = values
    if (l0 + l1 + l2 + l3) % 2 == 0:
        return l0 + l3 == l1 + l2
    return l0 == l1 + l2 + l3 + 1


def half_integer_regime(n: tuple) -> int:
    """Classify shifted couplings (sorted descending) into the three
    branching regimes of the half-integer family."""
    n0, n1, n2, n3 = sorted(n, reverse=True)
    if n0 >= n1 + n2 + n3:
        return 1
    if n0 >= n1 + n2 - n3:
        return 2
    return 3


def _first_dual_counts(n: tuple) -> tuple:
    n0, n1, n2, n3 = n
    return (
        (n0 + n1 + n2 + n3) // 2,
        (n0 + n1 - n2 - n3) // 2,
        (n0 - n1 + n2 - n3) // 2,
        (n0 - n1 - n2 + n3) // 2,
    )


def _second_dual_counts(n: tuple) -> tuple:
    n0, n1, n2, n3 = n
    return (
        (-n0 + n1 + n2 + n3) // 2,
        (n0 - n1 + n2 + n3) // 2,
        (n0 + n1 - n2 + n3) // 2,
        (n0 + n1 + n2 - n3) // 2,
    )


def half_integer_duals(n: tuple) -> tuple:
    """The two partner tuples of the half-integer operator with shifted
    couplings n.

    The first partner keeps the slot order of the first dual count
    vector, the second reverses the slot order of the second one; the
    sign flips the regime analysis prescribes for negative slots are
    exactly entrywise coupling canonicalization, which the tuple
    constructor applies.
    """
    if any(v < 0 or int(v) != v for v in n):
        raise ValueError("shifted couplings must be non-negative integers")
    if sum(n) % 2:
        raise ValueError("odd shifted-coupling sum leaves no quasi-solvable space")
    s = tuple(sorted(n, reverse=True))
    m1 = _first_dual_counts(s)
    m2 = _second_dual_counts(s)
    first = ParamTuple(tuple(v - HALF for v in m1))
    second = ParamTuple(tuple(v - HALF for v in reversed(m2)))
    return first, second


def _integer_members(l: ParamTuple) -> list:
    l0, l1, l2, l3 = (int(v) for v in l)
    if (l0 + l1 + l2 + l3) % 2 == 0:
        dual = even_dual(l)
        alphas = [
            (-l0, -l1, -l2, -l3),
            (-l0, -l1, l2 + 1, l3 + 1),
            (-l0, l1 + 1, -l2, l3 + 1),
            (-l0, l1 + 1, l2 + 1, -l3),
        ]
    else:
        dual = odd_dual(l)
        alphas = [
            (l0 + 1, -l1, -l2, -l3),
            (-l0, l1 + 1, -l2, -l3),
            (-l0, -l1, l2 + 1, -l3),
            (-l0, -l1, -l2, l3 + 1),
        ]
    members = []
    for perm, alpha in zip(_DUAL_PERMS, alphas):
        member = ParamTuple(tuple(dual[i] for i in perm))
        members.append((member, Witness("darboux", alpha=AlphaTuple(alpha))))
    members.extend(_shift_members(l))
    return members


def _shift_members(l: ParamTuple) -> list:
    members = [(l, Witness("identity"))]
    for k, perm in zip((1, 2, 3), _DUAL_PERMS[1:]):
        member = ParamTuple(tuple(l[i] for i in perm))
        members.append((member, Witness("shift", shift=k)))
    return members


def _half_integer_members(l: ParamTuple) -> tuple:
    n = l.n_values()
    if sum(n) % 2:
        note = "no quasi-solvable spaces: shifted couplings have odd sum"
        return _shift_members(l), note
    n0, n1, n2, n3 = n
    m1 = _first_dual_counts(n)
    m2 = _second_dual_counts(n)
    alphas = [
        (n0 + HALF, -n1 + HALF, -n2 + HALF, -n3 + HALF),
        (-n0 + HALF, n1 + HALF, -n2 + HALF, -n3 + HALF),
        (-n0 + HALF, -n1 + HALF, n2 + HALF, -n3 + HALF),
        (-n0 + HALF, -n1 + HALF, -n2 + HALF, n3 + HALF),
        (-n0 + HALF, -n1 + HALF, -n2 + HALF, -n3 + HALF),
        (-n0 + HALF, -n1 + HALF, n2 + HALF, n3 + HALF),
        (-n0 + HALF, n1 + HALF, -n2 + HALF, n3 + HALF),
        (-n0 + HALF, n1 + HALF, n2 + HALF, -n3 + HALF),
    ]
    members = []
    for block, counts in ((0, m1), (4, m2)):
        for offset, perm in enumerate(_DUAL_PERMS):
            member = ParamTuple(tuple(counts[i] - HALF for i in perm))
            alpha = AlphaTuple(alphas[block + offset])
            members.append((member, Witness("darboux", alpha=alpha)))
    members.extend(_shift_members(l))
    return members, None


def family(l: ParamTuple) -> PartnerFamily:
    """All operators linked to the source, with the witnessing edges."""
    if l.parity == "integer":
        members = _integer_members(l)
        note = None
        self_dual = is_self_dual(_sorted_descending(l))
    else:
        members, note = _half_integer_members(l)
        if note is None:
            duals = half_integer_duals(l.n_values())
            source = _sorted_descending(l)
            self_dual = source in {_sorted_descending(p) for p in duals}
        else:
            self_dual = False
    return PartnerFamily(l, tuple(members), self_dual, note)


def verify_member(source: ParamTuple, member: ParamTuple, witness: Witness) -> bool:
    """Re-check one family edge symbolically."""
    if witness.kind == "identity":
        return member == source
    if witness.kind == "shift":
        shifted = shift_half_period(potential(source), witness.shift)
        return shifted == potential(member)
    # a stored weight tuple names the selected transformation, so mirror
    # its three branches: direct, complementary, or no-op
    alpha = witness.alpha
    half_sum = -alpha.d
    if half_sum == 1:
        return member == source
    if half_sum >= 2:
        alpha = alpha.complement()
    expected = ParamTuple(tuple(a + alpha.d for a in alpha))
    if expected != member:
        return False
    if not intertwine_residual(source, alpha).is_zero:
        return False
    return characteristic_polynomial(alpha) == characteristic_polynomial(alpha.dual())
