"""Parameter collections (Farey set, intervals, sum-sets, Farey pairs) and their residue statistics.

Every counter here is computed from residue histograms. The pair and
quadruple loops that define the same quantities live in ``oracles``.
"""

from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .arith import mobius_table
from .curves import RationalParam

KINDS = ("farey", "interval", "sumset", "farey_pairs")

_FLOAT_EXACT = 2**53
_OUTER_CELLS = 1 << 22


@dataclass(frozen=True)
class ParamSet:
    kind: str
    T: int = 0
    U: tuple[int, ...] = ()
    V: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown parameter set kind {self.kind!r}")
        if self.kind == "sumset":
            if not self.U or not self.V:
                raise ValueError("sum-set needs non-empty U and V")
            if min(self.U + self.V) < 1:
                raise ValueError("sum-set elements must be positive integers")
            object.__setattr__(self, "U", tuple(int(u) for u in self.U))
            object.__setattr__(self, "V", tuple(int(v) for v in self.V))
            if not self.T:
                object.__setattr__(self, "T", max(self.U + self.V))
            elif max(self.U + self.V) > self.T:
                raise ValueError("sum-set elements must lie in [1, T]")
        elif self.T < 1:
            raise ValueError("T must be >= 1")

    @classmethod
    def farey(cls, T: int) -> ParamSet:
        return cls("farey", T)

    @classmethod
    def interval(cls, T: int) -> ParamSet:
        return cls("interval", T)

    @classmethod
    def sumset(cls, U: Sequence[int], V: Sequence[int], T: int = 0) -> ParamSet:
        return cls("sumset", T, tuple(U), tuple(V))

    @classmethod
    def farey_pairs(cls, T: int) -> ParamSet:
        return cls("farey_pairs", T)

    def size(self) -> int:
        """Number of parameters, counted with multiplicity."""
        if self.kind == "farey":
            return farey_count(self.T)
        if self.kind == "interval":
            return self.T
        if self.kind == "sumset":
            return len(self.U) * len(self.V)
        return farey_count(self.T) ** 2

    def multiplicity(self, t: Fraction) -> int:
        """How many enumerated parameters take the rational value t."""
        t = Fraction(t)
        if self.kind == "farey":
            return int(0 < t.numerator <= self.T and t.denominator <= self.T)
        if self.kind == "interval":
            return int(t.denominator == 1 and 1 <= t <= self.T)
        if self.kind == "sumset":
            if t.denominator != 1:
                return 0
            vs = Counter(self.V)
            return sum(vs[int(t) - u] for u in self.U)
        u, v = farey_arrays(self.T)
        members = set(zip(u.tolist(), v.tolist()))
        count = 0
        for a, b in members:
            rest = t - Fraction(a, b)
            if rest > 0 and (rest.numerator, rest.denominator) in members:
                count += 1
        return count

    def to_spec(self) -> dict:
        if self.kind == "sumset":
            return {"kind": "sumset", "U": list(self.U), "V": list(self.V), "T": self.T}
        return {"kind": self.kind, "T": self.T}


def _read_int_file(path: str | Path) -> list[int]:
    return [int(line) for line in Path(path).read_text().split() if line.strip()]


def parse_paramset(spec: dict, base_dir: Path | None = None) -> ParamSet:
    kind = spec.get("kind")
    if kind == "sumset":
        U, V = spec.get("U"), spec.get("V")
        base = base_dir or Path(".")
        if U is None and "U_file" in spec:
            U = _read_int_file(base / spec["U_file"])
        if V is None and "V_file" in spec:
            V = _read_int_file(base / spec["V_file"])
        if U is None or V is None:
            raise ValueError("sum-set spec needs U and V (lists or *_file paths)")
        return ParamSet.sumset(U, V, int(spec.get("T", 0)))
    if kind not in KINDS:
        raise ValueError(f"unknown parameter set kind {kind!r}")
    if "T" not in spec:
        raise ValueError(f"{kind} spec needs T")
    return ParamSet(kind, int(spec["T"]))


# -- Farey set -------------------------------------------------------------


def farey_enumerate(T: int) -> Iterator[RationalParam]:
    """Each u/v with gcd(u, v) = 1 and 1 <= u, v <= T exactly once.

    Pairs come out in shells of increasing height max(u, v), so the stream
    for T is a prefix of the stream for any larger T.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    for h in range(1, T + 1):
        for u in range(1, h + 1):
            if math.gcd(u, h) == 1:
                yield RationalParam(u, h)
        for v in range(1, h):
            if math.gcd(h, v) == 1:
                yield RationalParam(h, v)


@functools.lru_cache(maxsize=32)
def farey_arrays(T: int) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and denominators of F(T) as int64 arrays (read-only)."""
    r = np.arange(1, T + 1, dtype=np.int64)
    uu, vv = np.meshgrid(r, r, indexing="ij")
    keep = np.gcd(uu, vv) == 1
    u, v = uu[keep], vv[keep]
    u.flags.writeable = False
    v.flags.writeable = False
    return u, v


def farey_count(T: int) -> int:
    """#F(T) = sum_{d <= T} mu(d) floor(T/d)^2."""
    mu = mobius_table(T)
    d = np.arange(1, T + 1)
    return int((mu[1:] * (T // d) ** 2).sum())


# -- residue histograms ----------------------------------------------------


@dataclass(frozen=True)
class ResidueHistogram:
    p: int
    hist: np.ndarray = field(repr=False)
    skipped: int = 0

    @property
    def counts(self) -> dict[int, int]:
        nz = np.flatnonzero(self.hist)
        return {int(w): int(self.hist[w]) for w in nz}

    @property
    def total(self) -> int:
        return int(self.hist.sum())


def _inverse_table(vmax: int, p: int) -> np.ndarray:
    """inv[v] = v^{-1} mod p for 1 <= v <= vmax; 0 where p | v."""
    inv = np.zeros(vmax + 1, dtype=np.int64)
    for v in range(1, vmax + 1):
        if v % p:
            inv[v] = pow(v, -1, p)
    return inv


def farey_residues(T: int, p: int) -> tuple[np.ndarray, int]:
    """Residues u/v mod p over F(T) with p not dividing v, and the number skipped."""
    p = int(p)
    u, v = farey_arrays(T)
    ok = v % p != 0
    inv = _inverse_table(T, p)
    return u[ok] % p * inv[v[ok]] % p, int((~ok).sum())


def cyclic_self_convolution(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """c[s] = sum_{r} a[r] b[s - r mod p] (direct accumulation over the supports)."""
    if b is None:
        b = a
    p = len(a)
    ia, ib = np.flatnonzero(a), np.flatnonzero(b)
    if int(a.sum()) * int(b.sum()) >= _FLOAT_EXACT:
        raise OverflowError("histogram mass too large for exact accumulation")
    out = np.zeros(p, dtype=np.float64)
    if len(ia) == 0 or len(ib) == 0:
        return out.astype(np.int64)
    wb = b[ib].astype(np.float64)
    rows = max(1, _OUTER_CELLS // len(ib))
    for s in range(0, len(ia), rows):
        blk = ia[s : s + rows]
        idx = (blk[:, None] + ib[None, :]) % p
        wts = a[blk].astype(np.float64)[:, None] * wb[None, :]
        out += np.bincount(idx.ravel(), weights=wts.ravel(), minlength=p)
    return np.rint(out).astype(np.int64)


def residue_histogram(pset: ParamSet, p: int) -> ResidueHistogram:
    """Counts of parameters by residue mod p; fractions with p | denominator are skipped."""
    p = int(p)
    if pset.kind == "farey":
        res, skipped = farey_residues(pset.T, p)
        return ResidueHistogram(p, np.bincount(res, minlength=p).astype(np.int64), skipped)
    if pset.kind == "interval":
        t = np.arange(1, pset.T + 1, dtype=np.int64)
        return ResidueHistogram(p, np.bincount(t % p, minlength=p).astype(np.int64), 0)
    if pset.kind == "sumset":
        hu = np.bincount(np.array(pset.U, dtype=np.int64) % p, minlength=p).astype(np.int64)
        hv = np.bincount(np.array(pset.V, dtype=np.int64) % p, minlength=p).astype(np.int64)
        return ResidueHistogram(p, cyclic_self_convolution(hu, hv), 0)
    base = residue_histogram(ParamSet.farey(pset.T), p)
    n = farey_count(pset.T)
    good = n - base.skipped
    return ResidueHistogram(p, cyclic_self_convolution(base.hist), n * n - good * good)


# -- congruence counters ---------------------------------------------------


def coincidence_count_Q(T: int, p: int) -> int:
    """Ordered pairs in F(T)^2, denominators prime to p, congruent mod p."""
    h = residue_histogram(ParamSet.farey(T), p).hist
    return int((h * h).sum())


def additive_energy_V(T: int, p: int) -> int:
    """Ordered quadruples in F(T)^4 with r1 + r2 = r3 + r4 mod p."""
    h = residue_histogram(ParamSet.farey(T), p).hist
    c = cyclic_self_convolution(h)
    return int((c * c).sum())


def _phases(p: int, m, residues: np.ndarray) -> np.ndarray:
    k = np.multiply.outer(np.asarray(m, dtype=np.int64), residues) % p
    return np.exp(2j * np.pi * k / p)


def farey_expsum(T: int, p: int, m: int) -> complex:
    """sum over u/v in F(T), p not dividing v, of e_p(m u/v)."""
    h = residue_histogram(ParamSet.farey(T), p).hist
    r = np.flatnonzero(h)
    if m % p == 0:
        return complex(int(h.sum()))
    return complex((h[r] * _phases(p, m, r)).sum())


def farey_expsums(T: int, p: int) -> np.ndarray:
    """farey_expsum for every m in 0..p-1."""
    h = residue_histogram(ParamSet.farey(T), p).hist
    r = np.flatnonzero(h)
    out = np.empty(p, dtype=np.complex128)
    rows = max(1, _OUTER_CELLS // max(1, len(r)))
    for s in range(0, p, rows):
        m = np.arange(s, min(p, s + rows))
        out[s : s + len(m)] = _phases(p, m, r) @ h[r].astype(np.float64)
    out[0] = h.sum()
    return out


def sumset_enumerate(U: Sequence[int], V: Sequence[int]) -> Iterator[int]:
    """u + v for every ordered pair (u, v) in U x V."""
    if not U or not V:
        raise ValueError("sum-set needs non-empty U and V")
    for u in U:
        for v in V:
            yield u + v

