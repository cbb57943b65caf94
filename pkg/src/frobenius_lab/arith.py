"""Integer and modular primitives shared by the rest of the package."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class PrimeList:
    """All primes up to ``limit`` in increasing order."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def __getitem__(self, i):
        return self.primes[i]

    def count_upto(self, x: int) -> int:
        """pi(x) for x <= limit."""
        if x > self.limit:
            raise ValueError(f"x={x} exceeds sieve limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def between(self, lo: int, hi: int) -> list[int]:
        i = np.searchsorted(self.primes, lo, side="left")
        j = np.searchsorted(self.primes, hi, side="right")
        return [int(p) for p in self.primes[i:j]]


def sieve_primes(limit: int) -> PrimeList:
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    if limit < 2:
        return PrimeList(limit, np.array([], dtype=np.int64))
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return PrimeList(limit, np.flatnonzero(is_prime).astype(np.int64))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) by Euler's criterion."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def legendre_table(p: int) -> np.ndarray:
    """int8 array chi with chi[a] = (a|p) for 0 <= a < p.

    Used by the bulk trace sweeps: one O(p) build, O(1) lookups afterwards.
    """
    chi = -np.ones(p, dtype=np.int8)
    x = np.arange(1, p, dtype=np.int64)
    chi[x * x % p] = 1
    chi[0] = 0
    return chi


def mod_inverse(a: int, p: int) -> int:
    if a % p == 0:
        raise ZeroDivisionError(f"{a} is not invertible modulo {p}")
    return pow(a, -1, p)


def isqrt(n: int) -> int:
    """Exact floor square root (integer arithmetic only)."""
    if n < 0:
        raise ValueError("isqrt of a negative number")
    return math.isqrt(n)


def squarefree_part(n: int) -> int:
    """The squarefree d with n = d*m^2, sign(d) = sign(n)."""
    if n == 0:
        raise ValueError("squarefree part of 0 is undefined")
    sign = -1 if n < 0 else 1
    m = abs(n)
    d = 1
    q = 2
    while q * q <= m:
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            if e % 2:
                d *= q
        q += 1 if q == 2 else 2
    return sign * d * m


def mobius(d: int) -> int:
    if d < 1:
        raise ValueError("mobius is defined for d >= 1")
    result = 1
    q = 2
    while q * q <= d:
        if d % q == 0:
            d //= q
            if d % q == 0:
                return 0
            result = -result
        q += 1 if q == 2 else 2
    if d > 1:
        result = -result
    return result


def mobius_table(n: int) -> np.ndarray:
    """mu(0..n) by sieve; entry 0 is unused and set to 0."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in sieve_primes(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu
