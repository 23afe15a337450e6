from fractions import Fraction

import pytest

from chromarith.exact import PreconditionError
from chromarith.hondatate import (
    CMPlaceStructure,
    Covering,
    PAdicType,
    Place,
    WeilInteger,
    invariants_and_dimension,
    kottwitz_invariants,
    minimality_check,
    slopes_of_type,
    split_height_n_type,
    type_to_newton_polygon,
    validate_type,
    verify_weil_integer,
)


def split_pair(p=5):
    return CMPlaceStructure(
        (Place("u", 1, 1), Place("uc", 1, 1)), {"u": "uc", "uc": "u"}, p
    )


def test_validate_examples():
    n = 4
    t = PAdicType(split_pair(), {"u": Fraction(1, n), "uc": Fraction(n - 1, n)})
    assert validate_type(t) == []

    sym = PAdicType(split_pair(), {"u": Fraction(1, 2), "uc": Fraction(1, 2)})
    assert validate_type(sym) == []

    bad = PAdicType(split_pair(), {"u": 1, "uc": 1})
    assert validate_type(bad)


def test_slopes():
    n = 5
    t = split_height_n_type(n)
    assert slopes_of_type(t) == {"u": Fraction(1, n), "uc": Fraction(n - 1, n)}

    inert = CMPlaceStructure((Place("x", 1, 2),), {"x": "x"}, 5)
    t2 = PAdicType(inert, {"x": Fraction(1, 2)})
    assert slopes_of_type(t2)["x"] == Fraction(1, 2)

    etale = PAdicType(split_pair(), {"u": 0, "uc": 1})
    assert slopes_of_type(etale)["u"] == 0


def test_invariants_split_type():
    for n in range(2, 13):
        t = split_height_n_type(n)
        res = invariants_and_dimension(t)
        assert res.inv["u"] == Fraction(1, n)
        assert res.inv["uc"] == Fraction(n - 1, n)
        assert res.m == n
        assert res.dim == n
        assert res.degree == 2


def test_invariants_supersingular_style_pair():
    t = PAdicType(split_pair(), {"u": Fraction(1, 2), "uc": Fraction(1, 2)})
    res = invariants_and_dimension(t)
    assert res.m == 2
    assert res.dim == 2


def test_invariants_ordinary_type():
    t = PAdicType(split_pair(), {"u": 0, "uc": 1})
    res = invariants_and_dimension(t)
    assert res.m == 1
    assert res.dim == 1  # d/2 with d = 2


def test_invariants_real_place_contribution():
    # the degenerate rational type with slope 1/2 and a real place
    structure = CMPlaceStructure((Place("p", 1, 1),), {"p": "p"}, 5, real_places=1)
    t = PAdicType(structure, {"p": Fraction(1, 2)})
    res = invariants_and_dimension(t)
    assert res.inv["p"] == Fraction(1, 2)
    assert res.m == 2
    assert res.dim == 1


def test_invariants_rejects_bad_mode():
    with pytest.raises(PreconditionError):
        invariants_and_dimension(split_height_n_type(3), "frobenius")


def test_kottwitz_shift():
    n = 4
    t = split_height_n_type(n)
    plain = invariants_and_dimension(t).inv
    assert kottwitz_invariants(t, {}) == plain
    assert kottwitz_invariants(t, {"u": 0, "uc": 0}) == plain

    shifted = kottwitz_invariants(t, {"u": Fraction(1, n)})
    assert shifted["u"] == 0

    away = kottwitz_invariants(t, {"ell": Fraction(1, 2)})
    assert away["ell"] == Fraction(1, 2)

    real = kottwitz_invariants(t, {"oo": Fraction(1, 2)}, {"oo": "real"})
    assert real["oo"] == 0


def test_minimality_split_vs_invariant_place():
    sub = CMPlaceStructure((Place("x", 1, 1),), {"x": "x"}, 5)
    cov = Covering({"u": "x", "uc": "x"}, {"u": 1, "uc": 1})
    for n in (3, 4, 7):
        t = split_height_n_type(n)
        res = minimality_check(t, sub, cov)
        assert not res.descends

    t2 = PAdicType(split_pair(), {"u": Fraction(1, 2), "uc": Fraction(1, 2)})
    res2 = minimality_check(t2, sub, cov)
    assert res2.descends
    assert res2.eta_witness == {"x": Fraction(1, 2)}


def test_minimality_pullback_descends():
    # pull back the rational slope-1/2 type along a ramified covering
    sub = CMPlaceStructure((Place("x", 1, 1),), {"x": "x"}, 5)
    big = CMPlaceStructure((Place("y", 2, 1),), {"y": "y"}, 5)
    cov = Covering({"y": "x"}, {"y": 2})
    t = PAdicType(big, {"y": 1})  # eta = e_rel * (1/2)
    res = minimality_check(t, sub, cov)
    assert res.descends
    assert res.eta_witness == {"x": Fraction(1, 2)}


def test_minimality_rejects_bad_covering():
    sub = CMPlaceStructure((Place("x", 1, 1),), {"x": "x"}, 5)
    cov = Covering({"u": "x", "uc": "x"}, {"u": 2, "uc": 2})
    with pytest.raises(PreconditionError):
        minimality_check(split_height_n_type(3), sub, cov)


def test_weil_integers():
    assert verify_weil_integer(WeilInteger(-1, 2, 1, 5))[0] == "ok"
    assert verify_weil_integer(WeilInteger(-1, 1, 1, 2))[0] == "ok"
    verdict, norm = verify_weil_integer(WeilInteger(-1, 3, 1, 5))
    assert verdict == "violation" and norm == 10


def test_type_polygon_polarizable():
    for n in range(2, 10):
        poly = type_to_newton_polygon(split_height_n_type(n))
        assert poly.is_polarizable()
        assert poly.total() == (2 * n, n)
    inert = CMPlaceStructure((Place("x", 1, 2),), {"x": "x"}, 5)
    t = PAdicType(inert, {"x": Fraction(1, 2)})
    poly = type_to_newton_polygon(t)
    assert poly.is_polarizable()


def test_type_polygon_non_realizable():
    t = split_height_n_type(3)
    with pytest.raises(PreconditionError):
        type_to_newton_polygon(t, m=1)
