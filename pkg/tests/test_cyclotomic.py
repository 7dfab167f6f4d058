import doctest
import random
from fractions import Fraction

import pytest

import abtqft.cyclotomic as cyclotomic
from abtqft.cyclotomic import (
    CycNum,
    cyclotomic_polynomial,
    eta_kappa,
    exponent_sum,
    field_order,
    from_rational,
    gauss_sum,
    make_root,
    one,
    p_prime,
    q_power,
    root_q,
    sqrt_p_prime,
    to_complex,
    zero,
)


def _random_element(rng, M, size=3):
    phi = len(cyclotomic_polynomial(M)) - 1
    coeffs = [
        Fraction(rng.randint(-size, size), rng.randint(1, size))
        for _ in range(phi)
    ]
    return CycNum(M, coeffs)


def test_cyclotomic_polynomial_known_values():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_polynomial(24) == (1, 0, 0, 0, -1, 0, 0, 0, 1)
    # Phi_40(x) = Phi_10(x^4) = x^16 - x^12 + x^8 - x^4 + 1
    assert cyclotomic_polynomial(40) == (
        1, 0, 0, 0, -1, 0, 0, 0, 1, 0, 0, 0, -1, 0, 0, 0, 1,
    )


def test_make_root_identity_and_minus_one():
    assert make_root(24, 0) == 1
    assert make_root(24, 12) == -1
    assert make_root(24, 8) + make_root(24, 16) == -1
    assert make_root(24, -1) == make_root(24, 23)


def test_make_root_requires_order_divisible_by_8():
    with pytest.raises(ValueError):
        make_root(12, 1)


def test_roots_multiply_by_adding_exponents():
    rng = random.Random(7)
    for M in (8, 24, 40):
        for _ in range(20):
            a = rng.randrange(M)
            b = rng.randrange(M)
            assert make_root(M, a) * make_root(M, b) == make_root(M, a + b)


def test_field_ops_examples():
    i = make_root(8, 2)
    assert (1 + i) * (1 - i) == 2
    assert make_root(8, 1).conjugate() == make_root(8, 7)
    for j in range(24):
        assert make_root(24, j).inverse() == make_root(24, 24 - j)


def test_inverse_of_random_elements():
    rng = random.Random(21)
    for M in (8, 24):
        for _ in range(10):
            x = _random_element(rng, M)
            if x.is_zero():
                continue
            assert x * x.inverse() == 1
    with pytest.raises(ZeroDivisionError):
        zero(24).inverse()


def test_division_and_pow():
    x = make_root(24, 5) + 2
    assert (x / x) == 1
    assert x ** 0 == 1
    assert x ** 3 == x * x * x
    assert x ** -2 == (x * x).inverse()
    assert 1 / make_root(24, 7) == make_root(24, 17)


def test_reduction_round_trip():
    # reduce(a * Phi_M + r) == reduce(r) for random integer polys a, r
    rng = random.Random(5)
    for M in (8, 24, 40):
        phi_poly = list(cyclotomic_polynomial(M))
        phi = len(phi_poly) - 1
        for _ in range(15):
            a = [rng.randint(-4, 4) for _ in range(rng.randint(1, M - phi))]
            r = [rng.randint(-4, 4) for _ in range(phi)]
            prod = [0] * (len(a) + phi)
            for ia, ca in enumerate(a):
                for ip, cp in enumerate(phi_poly):
                    prod[ia + ip] += ca * cp
            total = list(prod)
            for j, cr in enumerate(r):
                total[j] += cr
            assert exponent_sum(M, total) == exponent_sum(M, r)


def test_conjugation_is_involutive_automorphism():
    rng = random.Random(11)
    for _ in range(10):
        x = _random_element(rng, 24)
        y = _random_element(rng, 24)
        assert x.conjugate().conjugate() == x
        assert (x + y).conjugate() == x.conjugate() + y.conjugate()
        assert (x * y).conjugate() == x.conjugate() * y.conjugate()


def test_mixed_orders_rejected():
    with pytest.raises(ValueError):
        make_root(8, 1) + make_root(24, 1)


def test_equality_and_hash_with_rationals():
    assert from_rational(24, Fraction(3, 2)) == Fraction(3, 2)
    assert hash(from_rational(24, 5)) == hash(5)
    assert make_root(24, 1) != 1
    # rational elements of different orders agree as values
    assert from_rational(8, 2) == from_rational(24, 2)
    assert from_rational(8, 2) != make_root(24, 8)


def test_field_order_and_p_prime():
    assert field_order(3) == 24
    assert field_order(4) == 8
    assert field_order(5) == 40
    assert field_order(12) == 24
    assert p_prime(7) == 7
    assert p_prime(12) == 6


def test_gauss_sum_zero_for_p_2_mod_4():
    G, _ = gauss_sum(6)
    assert G.is_zero()
    G10, _ = gauss_sum(10)
    assert G10.is_zero()


def test_gauss_sum_small_values():
    # p = 3: g = 1 + 2*zeta_3, computed by hand from three terms
    _, g3 = gauss_sum(3)
    assert g3 == 1 + 2 * make_root(24, 8)
    # p = 4: g = 1 + i
    _, g4 = gauss_sum(4)
    assert g4 == 1 + make_root(8, 2)
    assert g4 * g4.conjugate() == 2
    # p = 8: g = 2*zeta_8
    _, g8 = gauss_sum(8)
    assert g8 == 2 * make_root(8, 1)
    # p = 5: g = sqrt(5), real and positive
    _, g5 = gauss_sum(5)
    assert g5 == g5.conjugate()
    assert g5 * g5 == 5


def test_gauss_modulus_table():
    # |G|^2 = 2p, p, 0, p according to p mod 4 = 0, 1, 2, 3
    for p in range(3, 14):
        G, g = gauss_sum(p)
        norm = G * G.conjugate()
        if p % 4 == 0:
            assert norm == 2 * p
        elif p % 4 == 2:
            assert norm == 0
        else:
            assert norm == p
        if p % 4 != 2:
            assert g * g.conjugate() == p_prime(p)


def test_sqrt_p_prime_squares_to_p_prime():
    for p in (3, 4, 5, 7, 8, 9, 11, 12, 13):
        s = sqrt_p_prime(p)
        assert s * s == p_prime(p)
        # positivity via the numerical embedding
        approx = to_complex(s, 20)
        assert approx.real > 0
        assert abs(approx.imag) < 1e-18


def test_eta_kappa_known_values():
    eta5, kappa5 = eta_kappa(5)
    assert kappa5 == 1
    assert eta5 * eta5 * 5 == 1

    eta4, kappa4 = eta_kappa(4)
    assert kappa4 == make_root(8, 1)
    assert eta4 * eta4 * 2 == 1

    eta3, kappa3 = eta_kappa(3)
    assert eta3 * eta3 * 3 == 1
    assert kappa3 == make_root(24, 6)  # g(3) = i*sqrt(3), so kappa = i

    _, kappa12 = eta_kappa(12)
    assert kappa12 == make_root(24, 3)  # zeta_8 inside Q(zeta_24)


def test_eta_kappa_rejects_p_2_mod_4():
    with pytest.raises(ValueError):
        eta_kappa(6)
    with pytest.raises(ValueError):
        eta_kappa(2)


def test_kappa_is_eighth_root_for_supported_p():
    for p in (3, 4, 5, 7, 8, 9, 11, 12, 13):
        _, kappa = eta_kappa(p)
        assert kappa ** 8 == 1
        if p % 2:
            assert kappa ** 4 == 1


def test_root_q_and_q_power():
    for p in (3, 4, 5, 12):
        q = root_q(p)
        assert q ** p == 1
        for e in range(-3, 2 * p):
            assert q_power(p, e) == q ** (e % p)


def test_to_complex_examples():
    val = to_complex(make_root(8, 1), 10)
    assert abs(complex(val) - complex(0.7071067811865476, 0.7071067811865476)) < 1e-10
    _, g5 = gauss_sum(5)
    approx = to_complex(g5, 6)
    assert abs(complex(approx) - complex(2.2360679, 0)) < 1e-6
    assert complex(to_complex(zero(24), 3)) == 0j


def test_exponent_sum_matches_naive_sum():
    rng = random.Random(3)
    M = 24
    for _ in range(10):
        counts = {rng.randrange(3 * M): rng.randint(-5, 5) for _ in range(6)}
        naive = zero(M)
        for e, c in counts.items():
            naive = naive + c * make_root(M, e)
        assert exponent_sum(M, counts) == naive


def test_json_round_trip():
    rng = random.Random(13)
    for _ in range(5):
        x = _random_element(rng, 40)
        doc = x.to_json()
        assert CycNum.from_json(doc) == x
    doc = eta_kappa(3)[0].to_json(digits=12)
    assert "approx" in doc
    assert CycNum.from_json(doc) == eta_kappa(3)[0]


def test_doctests():
    failures, _ = doctest.testmod(cyclotomic)
    assert failures == 0
