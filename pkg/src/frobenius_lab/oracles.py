"""Brute-force reference computations.

Each function recomputes a quantity straight from its definition, without
the residue histograms, Legendre tables or closed forms used by the main
code paths. They are slow on purpose and only meant for small inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .curves import BadReduction, CurveFamily, CurveModP, RationalParam, specialize_mod_p, trace_naive


def is_prime_naive(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def farey_pairs_naive(T: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(1, T + 1) for v in range(1, T + 1) if math.gcd(u, v) == 1]


def coincidence_count_naive(T: int, p: int) -> int:
    """Pairs of F(T) with u1 v2 = u2 v1 mod p, p not dividing v1 v2 (cross-multiplied, no inverses)."""
    F = np.array([f for f in farey_pairs_naive(T) if f[1] % p], dtype=np.int64).reshape(-1, 2)
    u, v = F[:, 0], F[:, 1]
    return int(((np.multiply.outer(u, v) - np.multiply.outer(v, u)) % p == 0).sum())


def additive_energy_naive(T: int, p: int) -> int:
    """Quadruples of F(T) with r1 + r2 = r3 + r4 mod p, by cross-multiplication over F(T)^4."""
    F = np.array([f for f in farey_pairs_naive(T) if f[1] % p], dtype=np.int64).reshape(-1, 2)
    u, v = F[:, 0], F[:, 1]
    s_num = u[:, None] * v[None, :] + v[:, None] * u[None, :]
    s_den = v[:, None] * v[None, :]
    a = s_num.ravel() % p
    b = s_den.ravel() % p
    # r1 + r2 = r3 + r4  <=>  a12 * b34 = a34 * b12 (mod p)
    count = 0
    for i in range(len(a)):
        count += int(((a[i] * b - a * b[i]) % p == 0).sum())
    return count


def expsum_naive(T: int, p: int, m: int) -> complex:
    total = 0j
    for u, v in farey_pairs_naive(T):
        if v % p:
            angle = 2 * math.pi * (m * u * pow(v, -1, p) % p) / p
            total += complex(math.cos(angle), math.sin(angle))
    return total


def st_density_quadrature(alpha: float, beta: float, nodes: int = 64) -> float:
    """(2/pi) int sin^2 by Gauss-Legendre quadrature."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = (beta - alpha) / 2
    theta = alpha + half * (x + 1)
    return float(2 / math.pi * half * (w * np.sin(theta) ** 2).sum())


def semicircle_quadrature(a: float, b: float, nodes: int = 64) -> float:
    """(2/pi) int_a^b sqrt(1 - z^2) dz, substituting z = cos(theta) to remove the endpoint singularity."""
    return st_density_quadrature(math.acos(min(1.0, b)), math.acos(max(-1.0, a)), nodes)


class TraceCache:
    """trace_naive memoized by curve, for oracles that revisit the same fibers."""

    def __init__(self):
        self._cache: dict[tuple[int, int, int], int] = {}

    def __call__(self, curve: CurveModP) -> int:
        key = (curve.p, curve.A, curve.B)
        if key not in self._cache:
            self._cache[key] = trace_naive(curve)
        return self._cache[key]


def _angle_count(family: CurveFamily, params: Iterable[Fraction], p: int, alpha: float, beta: float,
                 traces: TraceCache) -> int:
    count = 0
    for t in params:
        curve = specialize_mod_p(family, RationalParam(t.numerator, t.denominator), p)
        if isinstance(curve, BadReduction):
            continue
        a = traces(curve)
        psi = math.acos(max(-1.0, min(1.0, a / (2 * math.sqrt(p)))))
        if alpha <= psi <= beta:
            count += 1
    return count


def angle_counter_B_naive(family, T, p, alpha, beta, traces=None) -> int:
    F = [Fraction(u, v) for u, v in farey_pairs_naive(T)]
    return _angle_count(family, (r + s for r, s in product(F, F)), p, alpha, beta, traces or TraceCache())


def angle_counter_C_naive(family, T, p, alpha, beta, traces=None) -> int:
    return _angle_count(family, (Fraction(t) for t in range(1, T + 1)), p, alpha, beta, traces or TraceCache())


def angle_counter_D_naive(family, U: Sequence[int], V: Sequence[int], p, alpha, beta, traces=None) -> int:
    return _angle_count(family, (Fraction(u + v) for u in U for v in V), p, alpha, beta, traces or TraceCache())


def discrepancy_naive(sample: Sequence[float], eps: float = 1e-9) -> float:
    """Max of |A - mG| over closed intervals with endpoints at -1, 1 and the sample values (and +-eps)."""
    from .harmonic import semicircle_G

    w = sorted(sample)
    pts = {-1.0, 1.0}
    for z in w:
        pts.update({z, max(-1.0, z - eps), min(1.0, z + eps)})
    pts = sorted(pts)
    m = len(w)
    best = 0.0
    for i, a in enumerate(pts):
        for b in pts[i:]:
            A = sum(1 for z in w if a <= z <= b)
            G = semicircle_G(a, b) if b > a else 0.0
            best = max(best, abs(A - m * G))
    return best
