"""Numeric spot checks behind the generic-period statements.

The exact layer proves identities between polynomials; this module
instantiates them.  Distinctness of spectral roots holds only for generic
periods, so the desk-scale stand-in samples random nomes, finds the roots
of the instantiated characteristic polynomials, and flags any pair closer
than 1e-6 times the root spread.  The first-order behaviour in the nome p
(lattice (1, tau), p = exp(i pi tau)) is available in closed form for the
tridiagonal matrix entries; `perturbation_oracle` returns those rational
coefficients, in units of pi^2 on the diagonal and pi^4 on the
superdiagonal, and `separation_discriminants` classifies how a double root
at p = 0 splits as p moves.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coeff import NumericPoint, evaluate
from .darboux import AlphaTuple
from .quasi import (
    ParamTuple,
    characteristic_polynomial,
    invariant_space_tuples,
    preserved_dimension,
    selected_char_poly,
)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PerturbationCoeffs:
    """Leading nome expansion of the tridiagonal entries at index r.

    a0 and a1 are the p^0 and p^1 parts of the diagonal entry over pi^2.
    offdiag holds the subdiagonal entry (index r+1, r; exact, unit-free)
    and the p^1 part of the superdiagonal entry (index r-1, r) over pi^4.
    """

    r: int
    a0: Fraction
    a1: Fraction
    offdiag: tuple[Fraction, Fraction]


@dataclass(frozen=True)
class SpaceRoots:
    """Roots of one invariant space's characteristic polynomial."""

    alpha: AlphaTuple
    roots: tuple[complex, ...]
    min_separation: float


@dataclass(frozen=True)
class DistinctnessReport:
    couplings: ParamTuple
    spaces: tuple[SpaceRoots, ...]
    roots: tuple[complex, ...]
    spread: float
    threshold: float
    min_separation: float
    collisions: tuple[tuple[complex, complex], ...]

    @property
    def distinct(self) -> bool:
        return not self.collisions


def sample_nomes(count: int, seed: int, low: float = 0.02, high: float = 0.2) -> list[float]:
    """Deterministic nome draws for genericity spot checks.

    The lower bound stays away from the degenerate p = 0 lattice so that
    the sampled points exercise the generic regime rather than the
    near-collision one.
    """
    gen = random.Random(seed)
    return [gen.uniform(low, high) for _ in range(count)]


def _horner(coeffs, x):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _polish(roots, coeffs):
    """Newton refinement of companion-matrix roots; linear at worst."""
    deriv = [k * c for k, c in enumerate(coeffs)][1:]
    out = []
    for x in roots:
        x = complex(x)
        for _ in range(60):
            slope = _horner(deriv, x)
            if slope == 0:
                break
            step = _horner(coeffs, x) / slope
            x -= step
            if abs(step) <= 1e-14 * (1 + abs(x)):
                break
        out.append(x)
    return out


def _roots_at(poly, pt: NumericPoint) -> list[complex]:
    coeffs = [evaluate(poly[k], pt) for k in range(poly.degree + 1)]
    if poly.degree == 0:
        return []
    raw = np.roots(list(reversed(coeffs)))
    return sorted(_polish(raw, coeffs), key=lambda x: (x.real, x.imag))


def eigenvalues_at(alpha: AlphaTuple, pt: NumericPoint) -> list[complex]:
    """Roots of the instantiated characteristic polynomial, polished."""
    pt.require_nondegenerate()
    return _roots_at(characteristic_polynomial(alpha), pt)


def _min_separation(roots) -> float:
    gaps = [abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :]]
    return min(gaps) if gaps else math.inf


def distinctness_report(l: ParamTuple, pt: NumericPoint) -> DistinctnessReport:
    """Pairwise root separations per invariant space and across all of them."""
    if l.parity != "integer":
        raise ValueError("integer couplings required")
    pt.require_nondegenerate()
    spaces = []
    roots: list[complex] = []
    for alpha in invariant_space_tuples(l):
        if preserved_dimension(alpha) == 0:
            continue
        found = tuple(_roots_at(selected_char_poly(alpha), pt))
        spaces.append(SpaceRoots(alpha, found, _min_separation(found)))
        roots.extend(found)
    spread = max(
        (abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :]),
        default=0.0,
    )
    threshold = 1e-6 * spread
    collisions = tuple(
        (a, b)
        for i, a in enumerate(roots)
        for b in roots[i + 1 :]
        if abs(a - b) <= threshold
    )
    return DistinctnessReport(
        couplings=l,
        spaces=tuple(spaces),
        roots=tuple(roots),
        spread=spread,
        threshold=threshold,
        min_separation=_min_separation(roots),
        collisions=collisions,
    )


def _diag_p0(alpha: AlphaTuple, r) -> Fraction:
    scatter = sum(a * (a - 1) for a in alpha.entries)
    return (2 * r + alpha[2] + alpha[3]) ** 2 - Fraction(scatter, 3)


def _diag_p1(alpha: AlphaTuple, r) -> Fraction:
    a0, a1, a2, a3 = alpha.entries
    return -8 * (
        r * (12 * r + 8 * a1 + 12 * a2 + 4 * a3)
        + 4 * alpha.gamma1 * alpha.gamma2
        - (a1 + a3) ** 2
        + (a1 + a2) ** 2
    )


def perturbation_oracle(alpha: AlphaTuple, r: int) -> PerturbationCoeffs:
    """Closed-form nome expansion of row r of the tridiagonal action."""
    if alpha.d < 0:
        raise ValueError(f"weight tuple {alpha.entries} spans no space")
    if not 0 <= r <= alpha.d:
        raise ValueError(f"row {r} outside 0..{alpha.d}")
    below = -4 * (r + alpha.gamma1) * (r + alpha.gamma2)
    above = 64 * r * (r + alpha[2] - HALF)
    return PerturbationCoeffs(
        r=r,
        a0=_diag_p0(alpha, r),
        a1=_diag_p1(alpha, r),
        offdiag=(below, above),
    )


def separation_discriminants(alpha: AlphaTuple, r: int, r_prime: int) -> str:
    """How a double eigenvalue at p = 0 splits for small p.

    The rows r < r' must carry equal p^0 diagonal values (which forces
    r + r' = -(alpha_2 + alpha_3)).  Non-adjacent rows split at order p
    unless the order-p discriminant degenerates; adjacent rows split at
    order sqrt(p) when the squared coefficient
    -16(a0-a1)(a2-a3)(a0+a1-1)(a2+a3-1) is nonzero, falling back to an
    order-p split when the subdiagonal entry vanishes because a0 = a1.
    """
    a0, a1, a2, a3 = alpha.entries
    if a0 == a1 == a2 == a3:
        raise ValueError("classification needs two distinct weights")
    if not 0 <= r < r_prime <= alpha.d:
        raise ValueError(f"need 0 <= r < r' <= {alpha.d}")
    if _diag_p0(alpha, r) != _diag_p0(alpha, r_prime):
        raise ValueError("rows do not collide at p = 0")
    if r_prime > r + 1:
        degenerate = (a3 - a1) * (2 * r + a2 + a3)
        return "separates at order p" if degenerate else "indeterminate"
    c_half_sq = -16 * (a0 - a1) * (a2 - a3) * (a0 + a1 - 1) * (a2 + a3 - 1)
    if a0 != a1 and c_half_sq:
        return "separates at order sqrt(p)"
    if a0 == a1:
        degenerate = (a2 - a3) * (a2 + a3 - 1) * (2 * a0 - 1)
        return "separates at order p" if degenerate else "indeterminate"
    return "indeterminate"
