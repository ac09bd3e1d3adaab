import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlocal.errors import BoundExceededError, DomainError
from twistlocal.ntkernel import (
    Factorization,
    SplitType,
    factor,
    genus_x0,
    is_prime,
    is_squarefree,
    kronecker_symbol,
    primes_below,
    splitting,
)


class TestKronecker:
    def test_identity_case(self):
        assert kronecker_symbol(1, 7) == 1

    def test_worked_example(self):
        # -29 = 10 mod 13; (10|13) = (2|13)(5|13) = (-1)(-1)
        assert kronecker_symbol(-29, 13) == 1

    def test_zero_modulus_rejected(self):
        with pytest.raises(DomainError):
            kronecker_symbol(3, 0)

    def test_euler_criterion_small(self):
        for p in primes_below(100):
            if p == 2:
                continue
            for a in range(1, p):
                euler = pow(a, (p - 1) // 2, p)
                expected = -1 if euler == p - 1 else euler
                assert kronecker_symbol(a, p) == expected, (a, p)

    def test_even_modulus(self):
        # (a|2) is 0 for even a, +1 for a = 1,7 mod 8, -1 for a = 3,5 mod 8
        assert kronecker_symbol(6, 2) == 0
        assert kronecker_symbol(7, 2) == 1
        assert kronecker_symbol(17, 2) == 1
        assert kronecker_symbol(3, 2) == -1
        assert kronecker_symbol(-3, 2) == -1  # -3 = 5 mod 8

    def test_negative_modulus(self):
        assert kronecker_symbol(-1, -1) == -1
        assert kronecker_symbol(2, -7) == kronecker_symbol(2, 7)
        assert kronecker_symbol(-2, -7) == -kronecker_symbol(-2, 7)

    @given(st.integers(-300, 300), st.integers(-300, 300), st.integers(-120, 120))
    def test_multiplicative_in_top(self, a, b, n):
        if n == 0:
            return
        assert kronecker_symbol(a * b, n) == kronecker_symbol(a, n) * kronecker_symbol(b, n)

    @given(st.integers(-300, 300), st.integers(1, 120), st.integers(1, 120))
    def test_multiplicative_in_bottom(self, a, m, n):
        assert kronecker_symbol(a, m * n) == kronecker_symbol(a, m) * kronecker_symbol(a, n)


class TestFactor:
    def test_level_of_interest(self):
        assert factor(26).factors == ((2, 1), (13, 1))

    def test_unit(self):
        assert factor(1).factors == ()
        assert factor(-1) == Factorization(-1, -1, ())

    def test_three_prime_product(self):
        # 17 * 19 * 23 assembled by hand, then refactored
        assert factor(7429).factors == ((17, 1), (19, 1), (23, 1))

    def test_exponents(self):
        assert factor(360).factors == ((2, 3), (3, 2), (5, 1))

    def test_negative(self):
        f = factor(-12)
        assert f.sign == -1 and f.factors == ((2, 2), (3, 1))

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            factor(0)

    def test_too_large(self):
        with pytest.raises(BoundExceededError, match="too large"):
            factor(10, bound=5)
        with pytest.raises(BoundExceededError):
            factor(2**64 + 1)

    def test_remultiplication_oracle(self):
        rng = random.Random(20260819)
        for _ in range(400):
            n = rng.randrange(2, 10**6)
            f = factor(n)
            value = 1
            for p, e in f.factors:
                assert is_prime(p)
                value *= p**e
            assert value == n

    def test_factors_strictly_increasing(self):
        f = factor(30030)
        assert list(f.primes) == sorted(set(f.primes))

    def test_invariant_enforced(self):
        with pytest.raises(DomainError):
            Factorization(10, 1, ((2, 1), (3, 1)))

    def test_squarefree(self):
        assert is_squarefree(30)
        assert not is_squarefree(12)
        assert is_squarefree(-15)
        assert not is_squarefree(0)


class TestSplitting:
    def test_split(self):
        assert splitting(5, -1) is SplitType.SPLIT

    def test_inert(self):
        # (2|13) = -1 because 13 = 5 mod 8
        assert splitting(13, 2) is SplitType.INERT

    def test_ramified(self):
        assert splitting(7, -7) is SplitType.RAMIFIED

    def test_two_adic_branches(self):
        assert splitting(2, 17) is SplitType.SPLIT
        assert splitting(2, 5) is SplitType.INERT
        assert splitting(2, 3) is SplitType.RAMIFIED  # 3 = 3 mod 4
        assert splitting(2, -2) is SplitType.RAMIFIED  # even d

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            splitting(5, 0)
        with pytest.raises(DomainError):
            splitting(5, 1)
        with pytest.raises(DomainError):
            splitting(5, 12)
        with pytest.raises(DomainError):
            splitting(6, 5)

    def test_consistent_with_symbol_on_odd_primes(self):
        for p in primes_below(60):
            if p == 2:
                continue
            for d in (-1, -2, 2, 3, 5, -23, 29):
                s = splitting(p, d)
                k = kronecker_symbol(d, p)
                if d % p == 0:
                    assert s is SplitType.RAMIFIED
                else:
                    assert s is (SplitType.SPLIT if k == 1 else SplitType.INERT)


class TestGenus:
    def test_fixtures(self):
        assert genus_x0(1) == 0
        assert genus_x0(11) == 1
        assert genus_x0(26) == 2
        assert genus_x0(65) == 5

    def test_not_squarefree(self):
        with pytest.raises(DomainError):
            genus_x0(4)

    def test_integrality_sweep(self):
        # the rational formula must cancel to a nonnegative integer every time
        for n in range(1, 10**4 + 1):
            if is_squarefree(n):
                assert genus_x0(n) >= 0


def test_primes_below():
    assert primes_below(2) == []
    assert primes_below(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    ps = primes_below(10**4)
    assert len(ps) == 1229 and all(is_prime(p) for p in ps[:50])
