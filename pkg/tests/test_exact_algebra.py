from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffrtf import poly as P
from ffrtf.bilaurent import BiLaurent
from ffrtf.cyclo import CycloRat
from ffrtf.fields import ExtField, PrimeField
from ffrtf.ratfunc import RatFunc1


def ext_fields_up_to_125():
    out = []
    for p in (3, 5, 7, 11):
        F = PrimeField(p)
        for d in (2, 3):
            if p**d <= 125:
                out.append(ExtField(F, P.monic_irreducibles(F, d)[0]))
    return out


# factor


def test_factor_t2_plus_1_over_f3_is_irreducible():
    F = PrimeField(3)
    f = (1, 0, 1)
    # oracle: no root in F_3, so no monic linear factor
    assert all(P.evaluate(F, f, c) != 0 for c in F.elements())
    assert P.factor(F, f) == (1, [(f, 1)])


def test_factor_t2_minus_t_over_f5():
    F = PrimeField(5)
    assert P.factor(F, (0, 4, 1)) == (1, [((0, 1), 1), ((4, 1), 1)])


def test_factor_t_is_t():
    for p in (3, 5, 7):
        assert P.factor(PrimeField(p), (0, 1)) == (1, [((0, 1), 1)])


def test_factor_zero_raises():
    with pytest.raises(ValueError):
        P.factor(PrimeField(3), ())


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(st.integers(0, 6), min_size=2, max_size=9))
def test_factor_round_trip(p, coeffs):
    F = PrimeField(p)
    f = P.trim(tuple(c % p for c in coeffs))
    if not f:
        return
    lead, facs = P.factor(F, f)
    prod = (lead,)
    for g, m in facs:
        assert P.is_irreducible(F, g)
        prod = P.mul(F, prod, P.power(F, g, m))
    assert prod == f


def test_factor_over_extension_field():
    F = PrimeField(3)
    K = ExtField(F, (1, 0, 1))
    lead, facs = P.factor(K, (1, 0, 1))
    assert [P.deg(g) for g, _ in facs] == [1, 1]


def test_irreducible_counts_match_necklace_formula():
    # number of monic irreducibles of degree d over F_q is (1/d) sum mu(d/e) q^e
    F = PrimeField(3)
    assert [len(P.monic_irreducibles(F, d)) for d in (1, 2, 3, 4)] == [3, 3, 8, 18]


# fields


def test_prime_field_rejects_bad_p():
    for p in (2, 4, 9, 17):
        with pytest.raises(ValueError):
            PrimeField(p)


def test_ext_field_rejects_reducible_modulus():
    with pytest.raises(ValueError):
        ExtField(PrimeField(5), (0, 4, 1))


@pytest.mark.parametrize("K", ext_fields_up_to_125(), ids=repr)
def test_ext_field_axioms_and_frobenius_exhaustive(K):
    els = list(K.elements())
    assert len(els) == K.order
    for a in els:
        assert K.add(a, K.neg(a)) == 0
        assert K.mul(a, K.one) == a
        if a:
            assert K.mul(a, K.inv(a)) == K.one
    image = set()
    for a in els:
        fa = K.frobenius(a)
        image.add(fa)
        for b in els[:: max(1, len(els) // 25)]:
            assert K.frobenius(K.add(a, b)) == K.add(fa, K.frobenius(b))
            assert K.frobenius(K.mul(a, b)) == K.mul(fa, K.frobenius(b))
    assert len(image) == K.order


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(ext_fields_up_to_125()), st.data())
def test_ext_field_ring_axioms(K, data):
    a, b, c = (data.draw(st.integers(0, K.order - 1)) for _ in range(3))
    assert K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c))
    assert K.mul(K.mul(a, b), c) == K.mul(a, K.mul(b, c))
    assert K.add(K.add(a, b), c) == K.add(a, K.add(b, c))
    assert K.mul(a, b) == K.mul(b, a)


@pytest.mark.parametrize("K", [PrimeField(5), ExtField(PrimeField(3), (1, 0, 1))], ids=repr)
def test_quadratic_character_counts(K):
    vals = [K.chi(a) for a in K.elements() if a]
    assert vals.count(1) == vals.count(-1) == (K.order - 1) // 2
    for a in K.elements():
        if a and K.chi(a) == 1:
            r = K.sqrts(a)
            assert len(r) == 2 and all(K.mul(x, x) == a for x in r)


# cyclotomic ring


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_cyclo_additive_character_sum_vanishes(p):
    for c in range(1, p):
        total = CycloRat(p, [0])
        for u in range(p):
            total = total + CycloRat.zeta(p, c * u)
        assert total.is_zero()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_cyclo_quadratic_gauss_sum_squares_to_signed_p(p):
    F = PrimeField(p)
    g = CycloRat(p, [0])
    for u in range(1, p):
        g = g + CycloRat.zeta(p, u) * F.chi(u)
    assert g * g == F.chi(p - 1) * p


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.data())
def test_cyclo_field_axioms(p, data):
    coeffs = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=p - 1, max_size=p - 1)
    a, b = CycloRat(p, data.draw(coeffs)), CycloRat(p, data.draw(coeffs))
    assert a * b == b * a
    assert (a + b) - b == a
    if not a.is_zero():
        assert a * a.inverse() == 1
        assert (b / a) * a == b
    assert CycloRat.parse(a.text()) == a


def test_cyclo_rings_do_not_mix():
    with pytest.raises(TypeError):
        CycloRat.zeta(3) + CycloRat.zeta(5)


# bilaurent


def test_bilaurent_spec_examples():
    Q1 = BiLaurent.monomial(1, 0)
    Q2 = BiLaurent.monomial(0, 1)
    assert Q1 * BiLaurent.monomial(-1, 0) == BiLaurent.one()
    assert (Q1 + Q2) * (Q1 - Q2) == BiLaurent.monomial(2, 0) - BiLaurent.monomial(0, 2)
    assert (BiLaurent.monomial(2, -1, 3) + 2).eval_at_zero() == 5


def test_derivative_functional_examples():
    assert BiLaurent.monomial(2, 1).derivative_functional(1, 1) == 2
    P_ = BiLaurent({(2, -1): 3, (0, 4): Fraction(1, 2)})
    assert P_.derivative_functional(0, 0) == P_.eval_at_zero()
    assert (BiLaurent.monomial(1, 0) + BiLaurent.monomial(-1, 0)).derivative_functional(1, 0) == 0


def test_bilaurent_mixed_rings_raise():
    with pytest.raises(TypeError):
        BiLaurent.one() + BiLaurent.one(5)
    with pytest.raises(TypeError):
        BiLaurent({(0, 0): CycloRat.zeta(5)})


def test_bilaurent_text_is_canonical():
    a = BiLaurent({(1, 0): 1, (-1, 2): Fraction(-3, 4), (0, 0): 0})
    assert a.text() == "-3/4*Q1^-1*Q2^2 + 1/1*Q1^1*Q2^0"
    assert BiLaurent().text() == "0"


bilaurent_terms = st.dictionaries(
    st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
    st.fractions(min_value=-9, max_value=9, max_denominator=8),
    max_size=6,
)


@settings(max_examples=200, deadline=None)
@given(bilaurent_terms, bilaurent_terms, bilaurent_terms)
def test_bilaurent_ring_axioms_and_round_trip(ta, tb, tc):
    a, b, c = BiLaurent(ta), BiLaurent(tb), BiLaurent(tc)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert BiLaurent.parse(a.text()) == a
    assert (a.text() == b.text()) == (a == b)


@settings(max_examples=60, deadline=None)
@given(bilaurent_terms, st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=4, max_size=4))
def test_bilaurent_cyclotomic_round_trip(ta, coeffs):
    a = BiLaurent(ta).promote(5) * CycloRat(5, coeffs)
    assert BiLaurent.parse(a.text()) == a


# one-variable rational functions


def test_ratfunc_geometric_series_identity():
    r = Fraction(1, 3)
    s = RatFunc1.geometric(Fraction(1), r, 0)
    assert s * RatFunc1([1, -r]) == RatFunc1.const(Fraction(1))
    tail = RatFunc1.geometric(Fraction(2), r, 2)
    head = RatFunc1([Fraction(2), 2 * r])
    assert head + tail == RatFunc1.geometric(Fraction(2), r, 0)


def test_ratfunc_laurent_terms_and_errors():
    x = RatFunc1([1, 2], shift=-1)
    assert x.laurent_terms() == {-1: 1, 0: 2}
    with pytest.raises(ValueError):
        RatFunc1.geometric(Fraction(1), Fraction(2), 0).laurent_terms()
