import pytest
import sympy
from hypothesis import given, strategies as st

from frobenius_lab.arith import (
    is_prime,
    isqrt,
    legendre,
    legendre_table,
    mobius,
    mobius_table,
    mod_inverse,
    sieve_primes,
    squarefree_part,
)
from frobenius_lab.oracles import is_prime_naive

ODD_PRIMES = sieve_primes(400).between(3, 400)


def test_sieve_small():
    assert list(sieve_primes(10)) == [2, 3, 5, 7]
    assert list(sieve_primes(1)) == []
    assert len(sieve_primes(100)) == 25


def test_sieve_matches_trial_division():
    pl = sieve_primes(2000)
    assert list(pl) == [n for n in range(2000 + 1) if is_prime_naive(n)]
    assert pl.count_upto(1000) == 168
    assert pl.between(10, 20) == [11, 13, 17, 19]


@given(st.integers(min_value=0, max_value=10**6))
def test_is_prime_agrees_with_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_legendre_examples():
    assert legendre(1, 5) == 1
    assert legendre(3, 5) == -1
    assert legendre(5, 5) == 0
    with pytest.raises(ValueError):
        legendre(1, 9)


@given(st.sampled_from(ODD_PRIMES), st.integers(min_value=-10**9, max_value=10**9))
def test_legendre_periodic_and_matches_table(p, a):
    assert legendre(a, p) == legendre(a % p, p) == legendre_table(p)[a % p]


@pytest.mark.parametrize("p", ODD_PRIMES[:30])
def test_legendre_sums_to_zero(p):
    assert sum(legendre(a, p) for a in range(p)) == 0
    assert int(legendre_table(p).sum()) == 0


def test_mod_inverse():
    assert mod_inverse(2, 5) == 3
    assert mod_inverse(1, 101) == 1
    with pytest.raises(ZeroDivisionError):
        mod_inverse(0, 5)


def test_isqrt_examples():
    assert isqrt(28) == 5
    assert isqrt(0) == 0
    assert isqrt(25) == 5


@given(st.integers(min_value=0, max_value=10**30))
def test_isqrt_brackets(n):
    r = isqrt(n)
    assert r * r <= n < (r + 1) ** 2


def test_squarefree_examples():
    assert squarefree_part(-16) == -1
    assert squarefree_part(-11) == -11
    assert squarefree_part(12) == 3
    with pytest.raises(ValueError):
        squarefree_part(0)


@given(st.integers(min_value=-4 * 10**7, max_value=4 * 10**7).filter(bool))
def test_squarefree_part_properties(n):
    s = squarefree_part(n)
    k2, rem = divmod(n, s)
    assert rem == 0 and k2 > 0 and isqrt(k2) ** 2 == k2
    assert squarefree_part(s) == s


def test_mobius_examples():
    assert mobius(1) == 1
    assert mobius(4) == 0
    assert mobius(6) == 1


def test_mobius_table_matches_sympy_and_divisor_sums():
    n = 10_000
    mu = mobius_table(n)
    assert all(mu[d] == sympy.mobius(d) for d in range(1, 500))
    sums = [0] * (n + 1)
    for d in range(1, n + 1):
        for m in range(d, n + 1, d):
            sums[m] += int(mu[d])
    assert sums[1] == 1
    assert not any(sums[2:])
