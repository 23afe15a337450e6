import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chromarith.exact import PreconditionError
from chromarith.modforms import (
    QSeries,
    WeightedForm,
    basis_of_weight,
    bernoulli,
    delta_qexp,
    eisenstein,
    monomial_numerator,
    sigma,
    verschiebung,
    weight_triples,
)

# tau(1..10), frozen from the classical table; independent of our expansion
RAMANUJAN_TAU = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_bernoulli_values():
    assert bernoulli(0) == 1
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(6) == Fraction(1, 42)
    for t in range(3, 40, 2):
        assert bernoulli(t) == 0


def test_bernoulli_against_sympy():
    import sympy

    for t in range(0, 62, 2):
        assert bernoulli(t) == Fraction(int(sympy.bernoulli(t).p), int(sympy.bernoulli(t).q))


def test_von_staudt_clausen_denominators():
    from chromarith.exact import is_prime

    for t in range(2, 62, 2):
        expected = 1
        for q in range(2, t + 2):
            if is_prime(q) and t % (q - 1) == 0:
                expected *= q
        assert bernoulli(t).denominator == expected


def test_lipshitz_sylvester_integrality():
    for k in range(1, 31):
        for n in range(1, 31):
            x = Fraction(k**n * (k**n - 1), n) * bernoulli(n)
            assert x.denominator == 1


def test_sigma():
    assert sigma(3, 1) == 1
    assert sigma(3, 2) == 9
    assert sigma(0, 6) == 4


def test_eisenstein_small():
    e4 = eisenstein(4, 3)
    assert e4.coeffs == (Fraction(1), Fraction(240), Fraction(2160))
    e6 = eisenstein(6, 2)
    assert e6.coeffs == (Fraction(1), Fraction(-504))
    with pytest.raises(PreconditionError):
        eisenstein(5, 10)
    with pytest.raises(PreconditionError):
        eisenstein(2, 10)


def test_eisenstein_weight_p_minus_1_is_1_mod_p():
    for p in (5, 7, 11):
        e = eisenstein(p - 1, 40).reduce_mod(p)
        assert e.coeffs[0] == 1
        assert all(c == 0 for c in e.coeffs[1:])


def test_delta_expansion_matches_tau_table():
    d = delta_qexp(11)
    assert d.coeffs[0] == 0
    assert [d.coeffs[i] for i in range(1, 11)] == RAMANUJAN_TAU


def test_delta_integrality():
    e4 = eisenstein(4, 100)
    e6 = eisenstein(6, 100)
    diff = e4.power(3) - e6.power(2)
    for c in diff.coeffs:
        assert c.denominator == 1
        assert c % 1728 == 0


def test_weight_triples():
    assert weight_triples(0, 0) == ((0, 0, 0),)
    assert set(weight_triples(12, 0)) == {(3, 0, 0), (0, 2, 0), (0, 0, 1)}
    # brute-force the enumeration bounds
    rng = random.Random(5)
    for _ in range(30):
        t = rng.randrange(-24, 61, 2)
        m = rng.randint(0, 2)
        got = set(weight_triples(t, m))
        brute = {
            (a, b, c)
            for a in range(0, 26)
            for b in range(0, 18)
            for c in range(-m, 12)
            if 4 * a + 6 * b + 12 * c == t
        }
        assert got == brute


def test_basis_of_weight_series():
    basis = basis_of_weight(12, 0, 8)
    assert len(basis.forms) == 3
    lookup = dict(zip(basis.triples, basis.forms))
    assert lookup[(0, 0, 1)].series == delta_qexp(8)
    assert lookup[(3, 0, 0)].series == eisenstein(4, 8).power(3)


def test_verschiebung_examples():
    one_plus_q = QSeries([1, 1, 0, 0, 0])
    assert verschiebung(one_plus_q, 2).coeffs == (1, 0, 1, 0, 0)
    const = QSeries([7, 0, 0])
    assert verschiebung(const, 3).coeffs == (7, 0, 0)
    f = QSeries([0, 1, 1, 0, 0, 0, 0])
    assert verschiebung(f, 3).coeffs == (0, 0, 0, 1, 0, 0, 1)


@settings(max_examples=60)
@given(
    st.lists(st.integers(-9, 9), min_size=1, max_size=8),
    st.lists(st.integers(-9, 9), min_size=1, max_size=8),
    st.sampled_from([2, 3, 5]),
)
def test_verschiebung_is_ring_homomorphism(a, b, ell):
    f = QSeries(a)
    g = QSeries(b)
    lhs = verschiebung(f * g, ell)
    rhs = verschiebung(f, ell) * verschiebung(g, ell)
    assert lhs == rhs
    assert verschiebung(f + g.truncate(min(len(a), len(b))), ell) == (
        verschiebung(f, ell) + verschiebung(g, ell)
    )


def test_qseries_reduce_and_errors():
    # 1/3 reduces mod 25; a denominator of 5 must fail loudly
    s = QSeries([Fraction(1, 3), Fraction(2, 5)])
    with pytest.raises(PreconditionError):
        s.reduce_mod(25)
    t = QSeries([Fraction(1, 3), Fraction(2, 7)])
    r = t.reduce_mod(25)
    assert (r.coeffs[0] * 3) % 25 == 1
    assert (r.coeffs[1] * 7) % 25 == 2


def test_qseries_json_roundtrip():
    s = QSeries([Fraction(1, 3), Fraction(-7, 2), Fraction(4)])
    assert QSeries.from_json(s.to_json()) == s
    m = QSeries([3, 11, 24], 25)
    assert QSeries.from_json(m.to_json()) == m


def test_weighted_form_pole_shift():
    f = WeightedForm(4, 0, eisenstein(4, 10))
    g = f.with_pole_order(2)
    assert g.pole_order == 2
    assert g.series == eisenstein(4, 10) * delta_qexp(10) * delta_qexp(10)
