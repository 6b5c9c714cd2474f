"""Tests for the finite-gap layer: Xi, the curve, and the commuting pair."""

from fractions import Fraction

import pytest

from heunfg.coeff import E1, E2, E3, ONE, ZERO, g2, g3, scalar
from heunfg.diffop import DiffOperator, commutator, heun_operator, poly_of_operator
from heunfg.efield import EllipticFunction, potential
from heunfg.epoly import EPoly
from heunfg.quasi import ParamTuple, full_char_poly, genus
from heunfg.spectral import (
    FiniteGapError,
    compute_Q,
    compute_xi,
    halved_lattice_image,
    lame_closed_form_A,
    operator_A,
    operator_A_tilde,
    spectral_data,
    verify_finite_gap,
)


def sorted_tuples(max_total):
    out = []
    for l0 in range(max_total + 1):
        for l1 in range(l0 + 1):
            for l2 in range(l1 + 1):
                for l3 in range(l2 + 1):
                    if l0 + l1 + l2 + l3 <= max_total:
                        out.append((l0, l1, l2, l3))
    return out


SWEEP = sorted_tuples(4)


class TestXiValues:
    def test_trivial_tuple(self):
        xi = compute_xi(ParamTuple((0, 0, 0, 0)))
        assert xi.genus == 0
        assert list(xi.a) == [EllipticFunction.one()]
        assert xi.c0 == EPoly.constant(1)
        assert xi.site_coeffs == ((), (), (), ())

    def test_one_gap_lame(self):
        xi = compute_xi(ParamTuple((1, 0, 0, 0)))
        assert xi.genus == 1
        # Xi = pe(x) + E
        assert xi.c0 == EPoly.variable()
        assert xi.site_coeffs == ((EPoly.constant(1),), (), (), ())
        assert xi.a == (EllipticFunction.one(), EllipticFunction.pe())

    def test_two_gap_lame(self):
        xi = compute_xi(ParamTuple((2, 0, 0, 0)))
        assert xi.genus == 2
        # Xi = 9 pe^2 + 3 E pe + E^2 - 9 g2 / 4
        assert xi.c0 == EPoly([-g2() * 9 / 4, ZERO, ONE])
        assert xi.site_coeffs[0] == (EPoly.constant(9), EPoly([ZERO, scalar(3)]))
        assert xi.site_coeffs[1:] == ((), (), ())

    def test_three_site_partner(self):
        xi = compute_xi(ParamTuple((1, 1, 1, 0)))
        assert xi.genus == 2
        # Xi = (E-3e3) pe + (E-3e2) pe(x+w1) + (E-3e1) pe(x+w2) + E^2 - 3 g2/2
        assert xi.c0 == EPoly([-g2() * 3 / 2, ZERO, ONE])
        assert xi.site_coeffs == (
            (EPoly([-3 * E3, ONE]),),
            (EPoly([-3 * E2, ONE]),),
            (EPoly([-3 * E1, ONE]),),
            (),
        )

    @pytest.mark.parametrize("tup", SWEEP)
    def test_normal_form(self, tup):
        xi = compute_xi(ParamTuple(tup))
        assert xi.a[0] == EllipticFunction.one()
        assert xi.c0.is_monic and xi.c0.degree == xi.genus == genus(ParamTuple(tup))
        content = EPoly.zero()
        for block in (xi.c0,) + tuple(p for site in xi.site_coeffs for p in site):
            content = content.gcd(block)
        assert content == EPoly.constant(1)
        assert tuple(len(site) for site in xi.site_coeffs) == tup

    def test_rejects_half_integer_couplings(self):
        with pytest.raises(ValueError):
            compute_xi(ParamTuple((Fraction(1, 2),) * 4))


class TestSpectralCurve:
    def test_one_gap_curve(self):
        l = ParamTuple((1, 0, 0, 0))
        q = compute_Q(compute_xi(l), l)
        assert q == EPoly([g3() / 4, -g2() / 4, ZERO, ONE])
        assert q == EPoly.from_roots([-E1, -E2, -E3])

    def test_two_gap_curve_shared_by_partner(self):
        expected = EPoly([-g2() * 3, ZERO, ONE]) * EPoly.from_roots(
            [3 * E1, 3 * E2, 3 * E3]
        )
        for tup in ((2, 0, 0, 0), (1, 1, 1, 0)):
            l = ParamTuple(tup)
            assert compute_Q(compute_xi(l), l) == expected

    @pytest.mark.parametrize("tup", SWEEP)
    def test_curve_equals_characteristic_polynomial(self, tup):
        l = ParamTuple(tup)
        q = compute_Q(compute_xi(l), l)
        assert q.is_monic and q.degree == 2 * genus(l) + 1
        assert q == full_char_poly(l)


class TestCommutingPair:
    def test_trivial_pair_is_plain_derivative(self):
        l = ParamTuple((0, 0, 0, 0))
        assert operator_A(compute_xi(l), l) == DiffOperator.d_dx()
        assert operator_A_tilde(l) == DiffOperator.d_dx()

    @pytest.mark.parametrize("tup", SWEEP)
    def test_composed_route_matches_direct(self, tup):
        l = ParamTuple(tup)
        g = genus(l)
        direct = operator_A(compute_xi(l), l)
        composed = operator_A_tilde(l)
        assert composed.order == direct.order == 2 * g + 1
        assert composed.is_monic
        assert direct.leading_coefficient == EllipticFunction.one().scale((-1) ** g)
        assert composed == (direct if g % 2 == 0 else -direct)

    @pytest.mark.parametrize("tup", [(1, 0, 0, 0), (1, 1, 0, 0), (2, 0, 0, 0), (1, 1, 1, 1)])
    def test_commutes_with_hamiltonian(self, tup):
        l = ParamTuple(tup)
        assert commutator(operator_A_tilde(l), heun_operator(l)).is_zero

    @pytest.mark.parametrize("tup", [(0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 0), (2, 0, 0, 0)])
    def test_square_closes_onto_curve(self, tup):
        # A*A + Q(H) = 0: the pair satisfies nu^2 = -Q(E)
        l = ParamTuple(tup)
        xi = compute_xi(l)
        a = operator_A(xi, l)
        q = compute_Q(xi, l)
        assert a.compose(a) == -poly_of_operator(q, heun_operator(l))

    def test_spectral_data_record(self):
        data = spectral_data(ParamTuple((1, 1, 0, 0)))
        assert data.genus == 1
        assert data.char_poly == data.curve
        assert data.composed == -data.direct


class TestVerifyReport:
    @pytest.mark.parametrize("tup", SWEEP)
    def test_full_sweep_passes(self, tup):
        rep = verify_finite_gap(ParamTuple(tup))
        assert rep.passed
        assert rep.composed_matches_direct
        assert rep.annihilates_invariant_spaces
        assert rep.kernel_dimension == 2 * rep.genus + 1
        assert rep.spectral_match
        assert rep.recursion_holds
        if rep.genus <= 3:
            assert rep.commutes is True
        if rep.genus <= 2:
            assert rep.square_is_curve is True

    def test_gates_skip_expensive_identities(self):
        rep = verify_finite_gap(
            ParamTuple((2, 0, 0, 0)), max_genus_commutator=1, max_genus_square=1
        )
        assert rep.commutes is None and rep.square_is_curve is None
        assert rep.passed


class TestClosedForms:
    @pytest.mark.parametrize("g", [1, 2])
    def test_equal_couplings(self, g):
        l = ParamTuple((g,) * 4)
        direct = operator_A(compute_xi(l), l)
        closed = lame_closed_form_A(g)
        assert closed == (direct if g % 2 == 0 else -direct)

    @pytest.mark.parametrize("g", [1, 2])
    def test_one_coupling_through_halved_lattice(self, g):
        l = ParamTuple((g, 0, 0, 0))
        imaged = halved_lattice_image(operator_A(compute_xi(l), l))
        closed = lame_closed_form_A(g, halved=True)
        assert closed == (imaged if g % 2 == 0 else -imaged)

    def test_duplication_identity(self):
        # sum over half periods of pe(x + w_i) equals 4 pe(2x)
        from heunfg.spectral import _duplication_map

        quadrupled = EllipticFunction.from_rational(4 * _duplication_map())
        shifts_sum = potential(ParamTuple((1, 1, 1, 1))).scale(Fraction(1, 2))
        assert quadrupled == shifts_sum

    def test_rejects_gapless_request(self):
        with pytest.raises(ValueError):
            lame_closed_form_A(0)
