from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffrtf import orbital
from ffrtf import poly as P
from ffrtf.bilaurent import BiLaurent
from ffrtf.moduli import enumerate_base, inv_D
from ffrtf.orbital import (
    J_functional,
    J_functional_table,
    J_functional_weighted,
    J_sum,
    N_side,
    OrbitRep,
    _is_regular,
    check_thresholds,
    degenerate_base,
    inv,
    orbital_at,
    orbital_regularized,
    orbital_via_local_product,
    orbital_via_X,
    regularized_tail,
)
from ffrtf.places import Divisor, DoubleCover, Place, RatFn, SigmaData, iter_rational_functions

CFG_A = DoubleCover(3, (1, 0, 1))
CFG_B = DoubleCover(5, (0, 4, 1))
F3 = CFG_A.F

NO_SIGMA = SigmaData()
A_PLUS = SigmaData((Place((0, 1)),), ())
A_MINUS = SigmaData((), (Place((1, 1)),))
A_BOTH = SigmaData((Place((0, 1)),), (Place((1, 1)),))
B_BOTH = SigmaData((Place((2, 1)),), (Place((3, 1)),))

A_D1 = Divisor.make({Place((2, 1)): 1})
B_D1 = Divisor.make({Place((1, 1)): 1})

ZERO, ONE = RatFn(P.ZERO), RatFn(P.ONE)
T = RatFn((0, 1))


def _regular_bases(cover, sigma, D):
    return [b for b in enumerate_base(cover, sigma, D) if _is_regular(inv_D(cover, b))]


# inv


def test_inv_of_the_generic_representative_is_u():
    for u in (T, RatFn.make(F3, (1, 1), (2, 0, 1)), RatFn((2,))):
        assert inv(F3, OrbitRep(u, "generic").matrix()) == u


def test_inv_of_unipotent_is_zero_and_of_weyl_element_is_infinity():
    assert inv(F3, (ONE, ONE, ZERO, ONE)) == ZERO
    assert inv(F3, (ZERO, ONE, RatFn((2,)), ZERO)) is None


def test_inv_of_coset_tags():
    for tag in ("1", "n+", "n-"):
        assert inv(F3, OrbitRep(ZERO, tag).matrix()) == ZERO
    for tag in ("w0", "n+w0", "n-w0"):
        assert inv(F3, OrbitRep(None, tag).matrix()) is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=4, max_size=4), st.integers(0, 200))
def test_inv_is_torus_bi_invariant(scalars, idx):
    u = [v for v in iter_rational_functions(F3, 1) if _is_regular(v)][idx % 20]
    a, b, c, d = OrbitRep(u, "generic").matrix()
    x1, x2, y1, y2 = (RatFn((s,)) for s in scalars)
    mul = lambda r, s: orbital.rat_mul(F3, r, s)  # noqa: E731
    moved = (mul(mul(x1, a), y1), mul(mul(x1, b), y2), mul(mul(x2, c), y1), mul(mul(x2, d), y2))
    assert inv(F3, moved) == u


def test_singular_matrix_is_rejected():
    with pytest.raises(ValueError):
        inv(F3, (ZERO, ZERO, ONE, ONE))


def test_orbit_rep_rejects_inconsistent_tags():
    with pytest.raises(ValueError):
        OrbitRep(ZERO, "generic")
    with pytest.raises(ValueError):
        OrbitRep(T, "n+")
    with pytest.raises(ValueError):
        OrbitRep(ZERO, "w0")


# two routes for regular orbits


@pytest.mark.parametrize("cover,sigma,D", [
    (CFG_A, NO_SIGMA, Divisor.make({})), (CFG_A, NO_SIGMA, A_D1), (CFG_A, A_PLUS, A_D1),
    (CFG_A, A_MINUS, A_D1), (CFG_A, A_BOTH, A_D1), (CFG_B, NO_SIGMA, B_D1), (CFG_B, B_BOTH, B_D1),
])
def test_divisor_route_equals_local_route_and_N_side(cover, sigma, D):
    for base in _regular_bases(cover, sigma, D):
        u = inv_D(cover, base)
        J = orbital_via_X(cover, sigma, D, u)
        assert J == orbital_via_local_product(cover, sigma, D, u)
        assert J == N_side(cover, sigma, base)


def test_local_route_is_stable_under_widened_bounds(monkeypatch):
    cover, sigma, D = CFG_A, A_PLUS, A_D1
    before = [orbital_via_local_product(cover, sigma, D, inv_D(cover, b)) for b in _regular_bases(cover, sigma, D)]
    monkeypatch.setattr(orbital, "WIDEN", orbital.WIDEN + 3)
    after = [orbital_via_local_product(cover, sigma, D, inv_D(cover, b)) for b in _regular_bases(cover, sigma, D)]
    assert before == after


@pytest.mark.parametrize("cover,sigma,D", [(CFG_A, NO_SIGMA, A_D1), (CFG_A, A_BOTH, A_D1), (CFG_B, B_BOTH, B_D1)])
def test_orbits_outside_the_image_vanish(cover, sigma, D):
    image = {inv_D(cover, b) for b in enumerate_base(cover, sigma, D)}
    for u in iter_rational_functions(cover.F, 1):
        if _is_regular(u) and u not in image:
            assert orbital_via_X(cover, sigma, D, u).is_zero()
            assert orbital_via_local_product(cover, sigma, D, u).is_zero()


@pytest.mark.parametrize("cover,sigma,D", [(CFG_A, NO_SIGMA, A_D1), (CFG_A, A_PLUS, A_D1), (CFG_B, NO_SIGMA, B_D1)])
def test_orbital_coefficients_have_two_power_denominators(cover, sigma, D):
    bound = 2 ** cover.rho
    for base in _regular_bases(cover, sigma, D):
        J = orbital_via_X(cover, sigma, D, inv_D(cover, base))
        for c in list(J.terms.values()) + [J.derivative_functional(0, 0)]:
            assert bound % Fraction(c).denominator == 0


def test_regular_routes_refuse_degenerate_u():
    with pytest.raises(ValueError):
        orbital_via_X(CFG_A, NO_SIGMA, A_D1, ZERO)
    with pytest.raises(ValueError):
        orbital_via_local_product(CFG_A, NO_SIGMA, A_D1, ONE)


# degenerate orbits


@pytest.mark.parametrize("cover,sigma,D", [
    (CFG_A, NO_SIGMA, Divisor.make({})), (CFG_A, NO_SIGMA, A_D1), (CFG_A, A_PLUS, A_D1), (CFG_A, A_MINUS, A_D1),
    (CFG_B, NO_SIGMA, B_D1),
])
@pytest.mark.parametrize("which", ["0", "inf"])
def test_regularized_orbit_equals_N_side_with_vanishing_tail(cover, sigma, D, which):
    base = degenerate_base(cover, sigma, D, which)
    J = orbital_regularized(cover, sigma, D, which)
    if base is None:
        assert J.is_zero()
    else:
        assert J == N_side(cover, sigma, base)
    assert not any(regularized_tail(cover, sigma, D, which).values())


def test_sigma_minus_kills_the_orbit_at_zero():
    assert orbital_regularized(CFG_A, A_MINUS, A_D1, "0").is_zero()
    assert degenerate_base(CFG_A, A_MINUS, A_D1, "0") is None
    assert orbital_regularized(CFG_A, A_PLUS, A_D1, "inf").is_zero()


def test_regularized_orbit_refuses_below_threshold():
    with pytest.raises(ValueError):
        orbital_regularized(CFG_A, A_BOTH, Divisor.make({}), "0")


def test_orbital_at_dispatches_on_u():
    assert orbital_at(CFG_A, NO_SIGMA, A_D1, None) == orbital_regularized(CFG_A, NO_SIGMA, A_D1, "inf")
    assert orbital_at(CFG_A, NO_SIGMA, A_D1, ZERO) == orbital_regularized(CFG_A, NO_SIGMA, A_D1, "0")


# derivative functional


@pytest.mark.parametrize("sigma", [NO_SIGMA, A_PLUS, A_MINUS, A_BOTH])
def test_symbolic_derivative_equals_weighted_count(sigma):
    table = J_functional_table(CFG_A, sigma, A_D1, 3)
    assert len(table) == 10
    for (rp, rm), (symbolic, weighted) in table.items():
        assert symbolic == weighted, (rp, rm)
    assert table[(1, 2)][0] == J_functional(CFG_A, sigma, A_D1, 1, 2) == J_functional_weighted(CFG_A, sigma, A_D1, 1, 2)


def test_order_zero_functional_is_the_value_at_the_origin():
    total = J_sum(CFG_A, A_PLUS, A_D1) * BiLaurent.monomial(1, 0)
    assert J_functional(CFG_A, A_PLUS, A_D1, 0, 0) == sum(total.terms.values(), Fraction(0))


@pytest.mark.parametrize("rp,rm", [(0, 0), (1, 0), (0, 1), (2, 1), (1, 2), (0, 3)])
def test_swapping_sigma_swaps_the_derivative_orders(rp, rm):
    plus_to_minus = SigmaData((), (Place((0, 1)),))
    assert J_functional(CFG_A, plus_to_minus, A_D1, rp, rm) == J_functional(CFG_A, A_PLUS, A_D1, rm, rp)
    swapped = SigmaData((Place((1, 1)),), (Place((0, 1)),))
    assert J_functional(CFG_A, swapped, A_D1, rp, rm) == J_functional(CFG_A, A_BOTH, A_D1, rm, rp)


def test_thresholds_are_enforced():
    with pytest.raises(ValueError, match="2g' - 1 \\+ N"):
        check_thresholds(CFG_A, A_BOTH, Divisor.make({}))
