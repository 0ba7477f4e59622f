from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffrtf.fields import ExtField, PrimeField
from ffrtf.local_pgl2 import (
    F_SQUARE,
    H_SQUARE,
    IWAHORI,
    IWAHORI_W,
    UNIT,
    LocalData,
    Representation,
    act_and_char,
    characterize_f_square,
    closed_form_ramified,
    closed_form_steinberg,
    convolve_whittaker,
    coset_masses,
    coset_masses_by_group_average,
    f_square,
    faithful_form_ramified,
    gauss_sum,
    h_square,
    hecke_eigenvalue_check,
    iwahori_w_hecke,
    lambda_nat,
    steinberg_W0,
    steinberg_w_translate,
    theta_nat,
    unramified_W0,
    verify_hf_decomposition,
    verify_xi_pushforward,
)
from ffrtf.places import INFINITY, DoubleCover, places_up_to

F3, F5 = PrimeField(3), PrimeField(5)
F9 = ExtField(F3, (1, 0, 1))
RESIDUE_FIELDS = [F3, F5, F9]
CFG_A = DoubleCover(3, (1, 0, 1))
CFG_B = DoubleCover(5, (0, 4, 1))


@pytest.mark.parametrize("k", RESIDUE_FIELDS, ids=lambda k: f"q{k.order}")
def test_xi_pushforward_equals_h_square(k):
    res = verify_xi_pushforward(k)
    assert res.ok, res.failures[:3]
    assert res.notes["all-square-units value"] == 8


def test_h_square_all_unit_value_is_eight():
    # every entry a nonzero square: 2^4 / 2
    assert h_square(F5, (1, 4, 1, 4)) == 8


@pytest.mark.parametrize("k", RESIDUE_FIELDS, ids=lambda k: f"q{k.order}")
def test_f_square_spans_the_eta_eigenspace(k):
    res = characterize_f_square(k)
    assert res.dimension == 1
    assert res.matches_coset_formula and res.value_at_one == 1
    assert res.f_square_table_matches and res.left_invariant and res.right_eigen


@pytest.mark.parametrize("k", RESIDUE_FIELDS, ids=lambda k: f"q{k.order}")
def test_delta_decomposition_and_symmetries(k):
    res = verify_hf_decomposition(k)
    assert res.identities_hold and res.symmetries_hold, res.failures[:3]
    assert res.right_part_nonzero and res.left_part_nonzero
    assert "row" not in res.classes.values()
    # the empty subset carries coefficient 1/2 in h - f (1 from phi_0, -1/2 from phi_1)
    assert res.coefficients[((), False)] == 1 and res.coefficients[((), True)] == Fraction(-1, 2)


@pytest.mark.parametrize("k", [F3, F5], ids=lambda k: f"q{k.order}")
def test_coset_masses_match_group_average(k):
    for fn in (h_square, f_square):
        for dual in (False, True):
            assert coset_masses(k, fn, dual) == coset_masses_by_group_average(k, fn, dual)


@pytest.mark.parametrize("cover", [CFG_A, CFG_B], ids=repr)
def test_gauss_sum_square_and_independence(cover):
    for x in cover.R:
        ld = LocalData.from_place(cover, x)
        k = ld.k
        g = gauss_sum(ld)
        assert g * g == k.chi(k.neg(1)) * ld.q
        for a in range(1, k.order):
            assert gauss_sum(ld, a) == g
        for c in range(1, k.order):
            # uniformizer c*w: psi(w'^{-1} e) uses kappa / c, eta(w') = eta(w) eta(c)
            moved = LocalData(k, k.div(ld.kappa, c), ld.eta_pi * k.chi(c), True)
            assert gauss_sum(moved) == g


def test_gauss_sum_outside_regime_raises():
    with pytest.raises(ValueError):
        gauss_sum(LocalData.from_place(CFG_B, INFINITY))
    split = next(x for x in places_up_to(CFG_B.F, 1, include_infinity=False) if x not in CFG_B.R)
    with pytest.raises(ValueError):
        gauss_sum(LocalData.from_place(CFG_B, split))


@pytest.mark.parametrize("cover", [CFG_A, CFG_B], ids=repr)
def test_dual_f_square_on_spherical_vector(cover):
    # pi(f^vee) W0 lives at v(a) = -1 with value eta(-a) g there
    for x in cover.R:
        ld = LocalData.from_place(cover, x)
        k = ld.k
        W = convolve_whittaker(ld, F_SQUARE, unramified_W0(ld.q, Fraction(3)), dual=True)
        g = gauss_sum(ld)
        for n in range(-3, 4):
            for e in range(1, k.order):
                if n == -1:
                    assert W.value_scaled(n, e, W.half * n) == g * (ld.eta_pi * k.chi(k.neg(e)))
                else:
                    assert W.T(n, e) == 0


@pytest.mark.parametrize("k", RESIDUE_FIELDS, ids=lambda k: f"q{k.order}")
def test_hecke_operator_eigenvalue(k):
    ld = LocalData.abstract(k, ramified=False)
    for alpha in (Fraction(2), Fraction(3), Fraction(1, 5)):
        assert hecke_eigenvalue_check(ld, alpha)


def test_unit_test_function_acts_trivially():
    ld = LocalData.abstract(F5, ramified=False)
    W0 = unramified_W0(5, Fraction(2))
    assert convolve_whittaker(ld, UNIT, W0) is W0


def test_convolution_below_level_zero_raises():
    ld = LocalData.abstract(F5, ramified=True)
    W = convolve_whittaker(ld, F_SQUARE, unramified_W0(5, Fraction(2)), dual=True)
    with pytest.raises(ValueError):
        convolve_whittaker(ld, F_SQUARE, W)


@pytest.mark.parametrize("k", RESIDUE_FIELDS, ids=lambda k: f"q{k.order}")
def test_normalized_periods_of_new_vectors(k):
    q = k.order
    ld = LocalData.abstract(k, ramified=False, eta_pi=-1)
    rep = Representation("unramified", Fraction(2))
    W0 = unramified_W0(q, Fraction(2))
    lam = lambda_nat(ld, W0, "trivial", rep)
    assert (lam.coef, lam.qhalf, lam.x_exp) == (1, 0, 0)
    assert theta_nat(ld, W0, W0, rep) == 1 - Fraction(1, q * q)
    for chi in (1, -1):
        st_rep = Representation("steinberg", Fraction(chi))
        S0 = steinberg_W0(q, chi)
        assert theta_nat(ld, S0, S0, st_rep) == 1 - Fraction(1, q)
        lw = lambda_nat(ld, steinberg_w_translate(k, chi), "eta", st_rep)
        # -(chi eta)(w) q^s
        assert (lw.coef, lw.qhalf, lw.x_exp) == (-chi * ld.eta_pi, 0, -1)


@pytest.mark.parametrize("k", [F3, F5], ids=lambda k: f"q{k.order}")
def test_steinberg_w_translate_against_iwahori_hecke_operator(k):
    # sum_u pi(n(u) w) W0 = -W0 on the Iwahori-fixed line of St x chi
    ld = LocalData.abstract(k, ramified=False)
    for chi in (1, -1):
        Ww = steinberg_w_translate(k, chi)
        out = iwahori_w_hecke(k, ld, Ww)
        minus_W0 = steinberg_W0(k.order, chi).scaled(Fraction(-1))
        assert out.agrees_with(minus_W0, 6)


def test_theta_continues_through_nontempered_parameter():
    # alpha^2 = q makes the inner product series diverge; the normalized value is unchanged
    ld = LocalData.abstract(F9, ramified=False)
    W0 = unramified_W0(9, Fraction(3))
    assert theta_nat(ld, W0, W0, Representation("unramified", Fraction(3))) == 1 - Fraction(1, 81)


def ramified_local_data():
    out = []
    for cover in (CFG_A, CFG_B, DoubleCover(3, (0, 2, 1))):
        for x in cover.R:
            out.append(LocalData.from_place(cover, x))
    return out


@pytest.mark.parametrize("ld", ramified_local_data(), ids=lambda ld: f"q{ld.q}-kappa{ld.kappa}")
def test_ramified_character_with_conjugation_kept(ld):
    for alpha in (2, 3, 5):
        rep = Representation("unramified", Fraction(alpha))
        jf = act_and_char(ld, rep, F_SQUARE)
        jh = act_and_char(ld, rep, H_SQUARE)
        assert jf.value == jh.value
        assert jf.value == faithful_form_ramified(ld).value
        stated = closed_form_ramified(ld).value
        # the stated form carries an extra eta(-1): equal exactly when q_x = 1 mod 4
        if ld.q % 4 == 1:
            assert jf.value == stated
        else:
            assert jf.value == stated * -1


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9).filter(lambda a: a not in (0, 1)))
def test_ramified_character_independent_of_satake_parameter(alpha):
    ld = LocalData.from_place(CFG_B, CFG_B.R[0])
    j = act_and_char(ld, Representation("unramified", alpha), F_SQUARE)
    assert j.value == faithful_form_ramified(ld).value


@pytest.mark.parametrize("cover", [CFG_A, CFG_B], ids=repr)
def test_steinberg_characters(cover):
    for x in places_up_to(cover.F, 2, include_infinity=False):
        if x in cover.R:
            continue
        ld = LocalData.from_place(cover, x)
        for chi in (1, -1):
            rep = Representation("steinberg", Fraction(chi))
            assert act_and_char(ld, rep, IWAHORI).value == closed_form_steinberg(ld, chi, False).value
            assert act_and_char(ld, rep, IWAHORI_W).value == closed_form_steinberg(ld, chi, True).value


def test_local_char_text():
    ld = LocalData.from_place(CFG_B, CFG_B.R[0])
    j = act_and_char(ld, Representation("unramified", Fraction(2)), F_SQUARE)
    assert j.text().startswith("V_x*(") and j.text().endswith("*Q1^1*Q2^-1)")


def test_whittaker_translate_round_trip():
    W0 = unramified_W0(5, Fraction(2))
    assert W0.translate(1, 1, F5).translate(-1, 1, F5).agrees_with(W0, 5)
