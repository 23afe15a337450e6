import random
from fractions import Fraction

import pytest

from chromarith.exact import PreconditionError, is_prime
from chromarith.hermitian import (
    INFINITE_PLACE,
    GlobalFormSpec,
    LocalFormClass,
    QuadImagField,
    global_classify_GU,
    global_exists_U,
    hilbert_symbol,
    is_local_norm,
    local_class_U,
    pairing_translate,
    standard_form_matrix,
    symbol_support,
    witt_index_from_table,
)

QI = QuadImagField(-1)
Q5 = QuadImagField(-5)


def test_field_basics():
    assert QI.discriminant == -4
    assert QuadImagField(-7).discriminant == -7
    assert Q5.discriminant == -20
    with pytest.raises(PreconditionError):
        QuadImagField(-4)
    with pytest.raises(PreconditionError):
        QuadImagField(5)
    assert QI.split_type(5) == "split"
    assert QI.split_type(3) == "inert"
    assert QI.split_type(2) == "ramified"
    assert QI.split_type(INFINITE_PLACE) == "archimedean"


def test_hilbert_symbol_examples():
    assert hilbert_symbol(-1, -1, INFINITE_PLACE) == -1
    assert hilbert_symbol(1, -1, INFINITE_PLACE) == 1
    assert hilbert_symbol(5, -1, 5) == 1
    with pytest.raises(PreconditionError):
        hilbert_symbol(0, 1, 5)


def test_hilbert_symbol_classical_values():
    # (2, 5)_5 = (2|5) = -1; (5, 5)_5 = (-1|5)(5/5...) standard checks
    assert hilbert_symbol(2, 5, 5) == -1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(2, 7, 7) == 1
    assert hilbert_symbol(3, 7, 7) == -1
    assert hilbert_symbol(2, 2, 2) == 1
    assert hilbert_symbol(2, 3, 2) == -1


def test_product_formula_random():
    rng = random.Random(13)
    for _ in range(200):
        a = Fraction(rng.randint(-1000, 1000) or 1, rng.randint(1, 1000))
        b = Fraction(rng.randint(-1000, 1000) or 1, rng.randint(1, 1000))
        prod = 1
        for v in symbol_support(a, b):
            prod *= hilbert_symbol(a, b, v)
        assert prod == 1


def test_is_local_norm_examples():
    # 5 = N(2 + i) is a norm everywhere for Q(i)
    for place in [2, 3, 5, 7, 11, INFINITE_PLACE]:
        assert is_local_norm(5, QI, place)
    assert not is_local_norm(3, QI, 3)
    for place in [2, 3, 5, 13, INFINITE_PLACE]:
        assert is_local_norm(1, QI, place)
        assert is_local_norm(1, Q5, place)


def test_pairing_translate():
    assert pairing_translate((0, 1), "beta_to_xi", QI) == (-2, 0)
    d = -1
    assert pairing_translate((1, 0), "xi_to_beta", QI) == (0, Fraction(1, 2 * d))
    for val in [(0, 3), (0, Fraction(-2, 7))]:
        there = pairing_translate(val, "beta_to_xi", Q5)
        back = pairing_translate(there, "xi_to_beta", Q5)
        assert back == val
    with pytest.raises(PreconditionError):
        pairing_translate((1, 1), "beta_to_xi", QI)
    with pytest.raises(PreconditionError):
        pairing_translate((0, 1), "xi_to_beta", QI)


def test_local_class_examples():
    rng = random.Random(3)
    # split places are constantly trivial
    for _ in range(30):
        entries = [rng.choice([-7, -2, -1, 1, 2, 3, 5, 10]) for _ in range(3)]
        assert local_class_U(QI, 3, 5, entries).kind == "trivial"
    cls = local_class_U(QI, 1, 3, [3])
    assert cls.kind == "disc" and cls.disc == 1
    sig = local_class_U(QI, 3, INFINITE_PLACE, [1, -1, 1])
    assert sig.signature == (2, 1)
    with pytest.raises(PreconditionError):
        local_class_U(QI, 2, 3, [1, 0])


def spec_with(field, n, finite, signature):
    local = [LocalFormClass(INFINITE_PLACE, "signature", signature=signature)]
    for place, disc in finite:
        local.append(LocalFormClass(place, "disc", disc=disc))
    return GlobalFormSpec(field, n, tuple(local))


def test_global_exists_examples():
    assert global_exists_U(spec_with(QI, 2, [], (2, 0)))
    assert not global_exists_U(spec_with(QI, 2, [(3, 1)], (2, 0)))
    assert global_exists_U(spec_with(QI, 2, [(3, 1)], (1, 1)))


def test_global_classify_examples():
    odd1 = spec_with(QI, 1, [], (1, 0))
    odd2 = spec_with(QI, 1, [], (0, 1))
    r1 = global_classify_GU(odd1, 1)
    r2 = global_classify_GU(odd2, 1)
    assert r1["similitude_invariant"] == r2["similitude_invariant"] == (1, 0)
    assert r1["exists"]

    even_ok = global_classify_GU(spec_with(QI, 2, [(3, 1)], (1, 1)), 2)
    assert even_ok["exists"]
    even_no = global_classify_GU(spec_with(QI, 2, [(3, 1)], (2, 0)), 2)
    assert not even_no["exists"]
    with pytest.raises(PreconditionError):
        global_classify_GU(spec_with(QI, 2, [], (2, 0)), 3)


def test_global_exists_iff_xi_sum_vanishes_random():
    rng = random.Random(11)
    inert_primes = {QI: [3, 7, 11, 19], Q5: [11, 13, 17, 19]}
    ram = {QI: [2], Q5: [2, 5]}
    for _ in range(500):
        field = rng.choice([QI, Q5])
        n = rng.randint(1, 4)
        finite = []
        for place in rng.sample(inert_primes[field] + ram[field], rng.randint(0, 3)):
            finite.append((place, rng.randint(0, 1)))
        p = rng.randint(0, n)
        spec = spec_with(field, n, finite, (p, n - p))
        total = (sum(d for _, d in finite) + (n - p)) % 2
        assert global_exists_U(spec) == (total == 0)


def test_scaling_covariance():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.choice([2, 4])
        entries = [rng.choice([-3, -1, 1, 2, 5, 7]) for _ in range(n)]
        r = rng.choice([-7, -2, -1, 2, 3, 5])
        scaled = [r * e for e in entries]
        for place in (3, 7, 2):
            before = local_class_U(QI, n, place, entries)
            after = local_class_U(QI, n, place, scaled)
            shift = 0 if is_local_norm(Fraction(r) ** n, QI, place) else 1
            assert after.disc == (before.disc + shift) % 2
        sb = local_class_U(QI, n, INFINITE_PLACE, entries).signature
        sa = local_class_U(QI, n, INFINITE_PLACE, scaled).signature
        assert sa == (sb if r > 0 else (sb[1], sb[0]))
        # for even n the similitude verdict is scaling-invariant
        spec_b = spec_with(
            QI, n, [(3, local_class_U(QI, n, 3, entries).disc)], sb
        )
        spec_a = spec_with(
            QI, n, [(3, local_class_U(QI, n, 3, scaled).disc)], sa
        )
        assert global_classify_GU(spec_b)["exists"] == global_classify_GU(spec_a)["exists"]


def test_norm_ses_surjectivity_desk_scale():
    # for every inert prime l <= 50 of Q(i) and a chosen second inert prime,
    # some rational is a non-norm exactly at those two places
    inert = [p for p in range(3, 51) if is_prime(p) and p % 4 == 3]
    for ell in inert:
        ell2 = next(p for p in inert if p != ell)
        found = None
        for a in [ell * ell2] + [k for k in range(2, 80)]:
            support = symbol_support(Fraction(a), Fraction(-1))
            bad = {
                v
                for v in support | {ell, ell2}
                if not is_local_norm(a, QI, v)
            }
            if bad == {ell, ell2}:
                found = a
                break
        assert found is not None


def test_standard_form_matrices_and_table():
    assert standard_form_matrix(2, True) == [[0, 1], [1, 0]]
    assert standard_form_matrix(3, True) == [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    assert standard_form_matrix(3, False)[2][2] == "a"
    m4 = standard_form_matrix(4, False)
    assert m4[2][2] == 1 and m4[3][3] == "-a"
    assert witt_index_from_table(4, True) == 2
    assert witt_index_from_table(4, False) == 1
    assert witt_index_from_table(5, True) == witt_index_from_table(5, False) == 2
