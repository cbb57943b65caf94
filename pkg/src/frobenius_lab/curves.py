"""Elliptic curves over prime fields and polynomial families E(Z): Y^2 = X^3 + f(Z)X + g(Z)."""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import is_prime, legendre_table, mod_inverse, squarefree_part
from .errors import DegenerateFamilyError

# Bound on the number of int64 cells materialized per block in the bulk sweeps.
_BLOCK_CELLS = 1 << 22


class SingularCurveError(ValueError):
    pass


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, coefficients in ascending degree, trailing zeros trimmed."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def of(cls, *coeffs: int) -> IntPoly:
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: IntPoly) -> IntPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(tuple(other * c for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> IntPoly:
        out = IntPoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, t):
        """Exact evaluation at an int or Fraction."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def eval_mod(self, w, p: int):
        """Horner evaluation mod p; ``w`` may be an int or an int64 array of residues."""
        acc = w * 0
        for c in reversed(self.coeffs):
            acc = (acc * w + c % p) % p
        return acc


class BadReduction(enum.Enum):
    DENOMINATOR = "denominator"
    DISCRIMINANT = "discriminant"


@dataclass(frozen=True)
class RationalParam:
    u: int
    v: int = 1

    def __post_init__(self):
        if self.u < 1 or self.v < 1:
            raise ValueError("parameters must have u, v >= 1")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError(f"{self.u}/{self.v} is not in lowest terms")

    def as_fraction(self) -> Fraction:
        return Fraction(self.u, self.v)


@dataclass(frozen=True)
class CurveModP:
    """Y^2 = X^3 + A X + B over F_p, p >= 5."""

    p: int
    A: int
    B: int

    def __post_init__(self):
        if self.p < 5 or not is_prime(self.p):
            raise ValueError(f"p={self.p} must be a prime >= 5")
        object.__setattr__(self, "A", self.A % self.p)
        object.__setattr__(self, "B", self.B % self.p)
        if (4 * self.A**3 + 27 * self.B**2) % self.p == 0:
            raise SingularCurveError(f"singular curve: 4A^3 + 27B^2 = 0 mod {self.p}")


def trace(curve: CurveModP) -> int:
    """a_p = -sum_x (x^3 + Ax + B | p)."""
    return int(traces_mod_p(curve.p, np.array([curve.A]), np.array([curve.B]))[0])


def trace_naive(curve: CurveModP) -> int:
    """a_p = p + 1 - #E(F_p) by counting points; never touches the Legendre symbol."""
    p, A, B = curve.p, curve.A, curve.B
    roots_of = [0] * p
    for y in range(p):
        roots_of[y * y % p] += 1
    points = 1  # point at infinity
    for x in range(p):
        points += roots_of[(x * x * x + A * x + B) % p]
    return p + 1 - points


def traces_mod_p(p: int, A: np.ndarray, B: np.ndarray, chi: np.ndarray | None = None) -> np.ndarray:
    """Traces of the curves (A[i], B[i]) over F_p, vectorized over i.

    Nonsingularity is the caller's responsibility.
    """
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    if chi is None:
        chi = legendre_table(p)
    x = np.arange(p, dtype=np.int64)
    x3 = x * x % p * x % p
    out = np.empty(len(A), dtype=np.int64)
    rows = max(1, _BLOCK_CELLS // p)
    for s in range(0, len(A), rows):
        a, b = A[s : s + rows, None], B[s : s + rows, None]
        rhs = (x3 + a * x + b) % p
        out[s : s + rows] = -chi[rhs].sum(axis=1, dtype=np.int64)
    return out


def frobenius_angle(a: int, p: int) -> float:
    if a * a > 4 * p:
        raise ValueError(f"|a|={abs(a)} exceeds the Hasse bound 2*sqrt({p})")
    c = a / (2.0 * math.sqrt(p))
    return math.acos(min(1.0, max(-1.0, c)))


def frobenius_field_disc(a: int, p: int) -> int:
    """Squarefree d < 0 such that the Frobenius field is Q(sqrt(d))."""
    if a == 0:
        raise ValueError("Frobenius field is not counted for a_p = 0")
    if a * a > 4 * p:
        raise ValueError(f"|a|={abs(a)} exceeds the Hasse bound 2*sqrt({p})")
    return squarefree_part(a * a - 4 * p)


def discriminant_poly(f: IntPoly, g: IntPoly) -> IntPoly:
    return (f**3 * 4 + g**2 * 27) * -16


def j_numerator(f: IntPoly) -> IntPoly:
    return (f * 4) ** 3 * -1728


def _proportional(a: IntPoly, b: IntPoly) -> bool:
    """True iff a = c*b for a rational constant c (b nonzero)."""
    if a.is_zero():
        return True
    if a.degree != b.degree:
        return False
    la, lb = a.coeffs[-1], b.coeffs[-1]
    return a * lb == b * la


def is_nondegenerate(f: IntPoly, g: IntPoly) -> bool:
    delta = discriminant_poly(f, g)
    if delta.is_zero():
        return False
    return not _proportional(j_numerator(f), delta)


@dataclass(frozen=True)
class CurveFamily:
    f: IntPoly
    g: IntPoly
    name: str = ""
    delta: IntPoly = field(init=False, compare=False, repr=False)
    j_num: IntPoly = field(init=False, compare=False, repr=False)
    nondegenerate: bool = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "delta", discriminant_poly(self.f, self.g))
        object.__setattr__(self, "j_num", j_numerator(self.f))
        object.__setattr__(self, "nondegenerate", is_nondegenerate(self.f, self.g))

    @property
    def j_den(self) -> IntPoly:
        return self.delta

    @classmethod
    def from_coeffs(cls, f: Sequence[int], g: Sequence[int], name: str = "") -> CurveFamily:
        return cls(IntPoly(tuple(f)), IntPoly(tuple(g)), name)

    @classmethod
    def constant(cls, A: int, B: int) -> CurveFamily:
        """The single curve Y^2 = X^3 + AX + B viewed as a constant family."""
        return cls(IntPoly((A,)), IntPoly((B,)), f"E[{A},{B}]")

    def require_nondegenerate(self) -> None:
        if not self.nondegenerate:
            raise DegenerateFamilyError(f"family {self.label} has Delta = 0 or constant j-invariant")

    @property
    def label(self) -> str:
        return self.name or f"f={list(self.f.coeffs)},g={list(self.g.coeffs)}"

    def j_invariant(self, t) -> Fraction:
        return Fraction(self.j_num(t)) / self.delta(t)

    def delta_vanishes_at(self, t: Fraction) -> bool:
        return self.delta(Fraction(t)) == 0

    def rational_delta_roots(self) -> frozenset[Fraction]:
        return _rational_roots(self.delta.coeffs)

    def coefficients_mod_p(self, w: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f(w), g(w), good) mod p for an array of residues; good means Delta(w) != 0 mod p."""
        w = np.asarray(w, dtype=np.int64) % p
        A = self.f.eval_mod(w, p)
        B = self.g.eval_mod(w, p)
        disc = (4 * (A * A % p) * A + 27 * (B * B % p)) % p
        return A, B, disc != 0


@functools.lru_cache(maxsize=256)
def _rational_roots(coeffs: tuple[int, ...]) -> frozenset[Fraction]:
    import sympy

    if not coeffs:
        raise DegenerateFamilyError("zero polynomial has every rational number as a root")
    z = sympy.Symbol("z")
    poly = sympy.Poly(list(reversed(coeffs)), z, domain="ZZ")
    roots = sympy.roots(poly, filter="Q")
    return frozenset(Fraction(int(r.p), int(r.q)) for r in roots)


def j_family() -> CurveFamily:
    """f = 3Z(1728 - Z), g = 2Z(1728 - Z)^2, whose j-invariant is Z itself."""
    z = IntPoly.of(0, 1)
    c = IntPoly.of(1728, -1)
    return CurveFamily(3 * z * c, 2 * z * c**2, "j-family")


def specialize_mod_p(family: CurveFamily, t: RationalParam, p: int) -> CurveModP | BadReduction:
    if t.v % p == 0:
        return BadReduction.DENOMINATOR
    if p < 5:
        raise ValueError("specialization requires p >= 5")
    w = t.u * mod_inverse(t.v, p) % p
    if family.delta.eval_mod(w, p) == 0:
        return BadReduction.DISCRIMINANT
    return CurveModP(p, family.f.eval_mod(w, p), family.g.eval_mod(w, p))


def parse_family(spec: dict) -> CurveFamily:
    """Family from {"f": [...], "g": [...]} or {"preset": "j-family"}."""
    if "preset" in spec:
        name = spec["preset"]
        if name == "j-family":
            return j_family()
        raise ValueError(f"unknown family preset {name!r}")
    try:
        f, g = spec["f"], spec["g"]
    except KeyError as exc:
        raise ValueError(f"family spec missing key {exc}") from None
    if not all(isinstance(c, int) for c in list(f) + list(g)):
        raise ValueError("family coefficients must be integers")
    return CurveFamily.from_coeffs(f, g, spec.get("name", ""))
