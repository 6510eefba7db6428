import math
import random
from fractions import Fraction

import pytest

from tau_ratio_lab import constants
from tau_ratio_lab.constants import (
    C_and_prime_sums,
    K_of_a,
    beta,
    big_K,
    e_a,
    e_a_prime_power,
    kappa,
    kappa_closed,
    lemma10_prediction,
)
from tau_ratio_lab.reference_values import KAPPA_REFERENCE


def test_beta_examples():
    assert beta(1) == 1
    assert beta(2) == Fraction(1, 3)
    assert beta(12) == Fraction(4, 21) == beta(6)


def test_beta_radical_invariance():
    for a in range(1, 200):
        rad = 1
        for p in set(constants.factorize(a).distinct_primes):
            rad *= p
        assert beta(a) == beta(rad)
        assert 0 < beta(a) <= 1


def test_e_a_examples():
    assert e_a(2, 3) == Fraction(4, 7) == beta(3)
    assert e_a(2, 2) == 4
    assert e_a(4, 4) == 5


def test_e_a_prime_power_examples():
    assert e_a_prime_power(2, 2, 1) == 4
    assert e_a_prime_power(2, 2, 3) == 2
    assert e_a_prime_power(4, 2, 1) == 2
    with pytest.raises(ValueError):
        e_a_prime_power(2, 4, 1)


def test_e_a_prime_power_vs_definition_sum():
    for p in (2, 3, 5, 7):
        for m in range(5):
            a = p**m
            for k in range(1, 7):
                assert e_a_prime_power(a, p, k) == e_a(a, p**k)


def test_e_a_multiplicative():
    rng = random.Random(424242)
    for a in (1, 2, 6, 12):
        checked = 0
        while checked < 200:
            m = rng.randrange(2, 5000)
            n = rng.randrange(2, 5000)
            if math.gcd(m, n) != 1:
                continue
            assert e_a(a, m * n) == e_a(a, m) * e_a(a, n)
            checked += 1


def test_kappa_reference_values():
    for a, (ref, tol) in KAPPA_REFERENCE.items():
        assert abs(kappa(a).kappa - ref) <= tol, a


def test_kappa_one_and_multiplicative():
    assert kappa(1).kappa == 1.0
    rng = random.Random(31337)
    checked = 0
    while checked < 50:
        a1 = rng.randrange(2, 100)
        a2 = rng.randrange(2, 100)
        if math.gcd(a1, a2) != 1 or a1 * a2 > 10**4:
            continue
        assert abs(kappa(a1 * a2).kappa - kappa(a1).kappa * kappa(a2).kappa) <= 1e-12
        checked += 1


def test_kappa_closed_vs_series():
    for p in (2, 3, 5):
        for m in range(1, 5):
            assert abs(kappa_closed(p, m) - kappa(p**m).kappa) <= 1e-12
    with pytest.raises(ValueError):
        kappa_closed(2, 5)


def test_big_K_partial_over_two_primes():
    def factor(p):
        return 1 / math.sqrt(p * (p - 1)) + math.sqrt(1 - 1 / p) * (p - 1) * math.log(
            p / (p - 1))
    assert factor(2) * factor(3) / math.sqrt(math.pi) == pytest.approx(0.7230, abs=1e-4)


def test_big_K_cutoff_stability():
    for cutoff in (10**4, 10**5, 10**6):
        r1 = big_K(0.5 / cutoff)
        r2 = big_K(0.25 / cutoff)
        assert r2.cutoff == 2 * r1.cutoff
        assert abs(r1.value - r2.value) <= r1.tail_bound
        assert r2.tail_bound < r1.tail_bound


def test_big_K_cutoff_1e3_near_converged():
    assert abs(big_K(0.5e-3).value - big_K(1e-6).value) <= 1e-4


def test_big_K_thread_determinism():
    assert big_K(1e-6, threads=1).value == big_K(1e-6, threads=8).value


def test_C_and_L():
    C, L = C_and_prime_sums(1e-6)
    assert C.value == pytest.approx(1.9435964, abs=1e-6)
    # three-term truncation of L by hand
    hand = math.log(2) / 3 + math.log(3) / 7 + math.log(5) / 21
    assert hand == pytest.approx(0.46463, abs=1e-5)
    assert L.value > hand
    # per-prime identity reconciling the two displays
    p = 2
    lhs = math.log(p) / (p * p - p + 1) + math.log(p) / (p - 1)
    rhs = p * p * math.log(p) / ((p - 1) * (p * p - p + 1))
    assert lhs == pytest.approx(rhs, abs=1e-15)
    assert lhs == pytest.approx(0.924196, abs=1e-6)


def test_K_of_a():
    K = big_K(1e-6).value
    assert K_of_a(1, 1e-6) == K
    assert K_of_a(2, 1e-6) == pytest.approx(0.5085886, abs=1e-6)
    assert K_of_a(4, 1e-6) == pytest.approx(0.4644930, abs=1e-6)


def test_lemma10_prediction_structure():
    # correction term for m=2 is 4 ln2 / 3
    corr = (lemma10_prediction(2, 100.0) / (C_and_prime_sums(1e-6)[0].value
                                            * float(beta(2))))
    base = (lemma10_prediction(1, 100.0) / C_and_prime_sums(1e-6)[0].value)
    assert corr - base == pytest.approx(4 * math.log(2) / 3, abs=1e-12)
    # only the ln x term moves: prediction(e*x) - prediction(x) = C
    C = C_and_prime_sums(1e-6)[0].value
    d = lemma10_prediction(1, math.e * 1000.0) - lemma10_prediction(1, 1000.0)
    assert d == pytest.approx(C, abs=1e-9)


def test_target_tail_domain():
    with pytest.raises(ValueError):
        big_K(1e-1)
    with pytest.raises(ValueError):
        big_K(1e-13)
