import pytest

from chromarith.exact import PreconditionError, val_p
from chromarith.greek import (
    GreekIndex,
    alpha_invariant_order,
    alpha_max_order_exponent,
    beta_invariant_exists,
    greek_stem,
    norm_I,
)
from chromarith.modforms import bernoulli


def test_norm_examples():
    assert norm_I(GreekIndex(5, 1, (1, 1))) == 1
    assert norm_I(GreekIndex(5, 2, (1, 1, 1))) == 10
    assert norm_I(GreekIndex(3, 2, (1, 2, 1))) == 10


def test_stem_examples():
    assert greek_stem(GreekIndex(5, 1, (1, 1)), 1) == 7
    assert greek_stem(GreekIndex(5, 2, (1, 1, 1)), 1) == 38
    assert greek_stem(GreekIndex(5, 2, (1, 1, 1)), 0) == -10
    # first alpha lives in stem 2p - 3 at every odd prime
    for p in (3, 5, 7, 11):
        assert greek_stem(GreekIndex(p, 1, (1, 1)), 1) == 2 * p - 3


def test_alpha_examples():
    assert alpha_invariant_order(5, 4, 1).exists
    assert alpha_invariant_order(5, 4, 1).order == 5
    assert not alpha_invariant_order(5, 5, 1).exists
    v = alpha_invariant_order(5, 20, 2)
    assert v.exists and v.order == 25
    with pytest.raises(PreconditionError):
        alpha_invariant_order(2, 4, 1)


def test_alpha_monotone_in_j():
    for p in (5, 7):
        for i in range(1, 30):
            t = (p - 1) * i
            jmax = 0
            for j in range(1, 6):
                if alpha_invariant_order(p, t, j).exists:
                    jmax = j
            for j in range(1, jmax + 1):
                assert alpha_invariant_order(p, t, j).exists


def test_alpha_agrees_with_bernoulli_denominator():
    for p in (5, 7):
        for i in range(1, p * p + 1):
            t = (p - 1) * i
            jmax = alpha_max_order_exponent(p, i)
            assert alpha_invariant_order(p, t, jmax).exists
            assert not alpha_invariant_order(p, t, jmax + 1).exists
            bt_over_t = bernoulli(t) / t
            assert val_p(bt_over_t.denominator, p) == jmax


def test_beta_examples():
    v = beta_invariant_exists(5, 5, 1, 1)
    assert v.exists and v.weight == 116 and v.order == 5
    v = beta_invariant_exists(5, 5, 5, 2)
    assert not v.exists
    v = beta_invariant_exists(5, 1, 2, 1)
    assert not v.exists and "condition (2)" in v.note
    with pytest.raises(PreconditionError):
        beta_invariant_exists(3, 1, 1, 1)


def test_beta_nu_zero_is_flagged():
    v = beta_invariant_exists(5, 1, 1, 1)
    assert not v.exists
    assert v.flagged
    v2 = beta_invariant_exists(5, 5, 1, 1)
    assert not v2.flagged


def test_beta_condition2_upper_bound_attained():
    for p in (5, 7):
        j = p + 1 - 1  # p^1 + p^0 - 1 at nu = 1
        v = beta_invariant_exists(p, p, j, 1)
        assert "condition (2)" not in v.note


def test_beta_weight_formula():
    for (p, i, j) in [(5, 2, 1), (5, 5, 3), (7, 7, 2)]:
        v = beta_invariant_exists(p, i, j, 1)
        assert v.weight == (p * p - 1) * i - (p - 1) * j
