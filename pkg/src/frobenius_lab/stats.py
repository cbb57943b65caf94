"""Prime-counting statistics of single curves and of family averages.

All counters skip p in {2, 3} and primes of bad reduction (Delta = 0 mod p).
Per-prime work is independent, so sweeps split the prime list into blocks
and may farm the blocks out to worker processes; blocks are merged in prime
order and every count is an integer, so results do not depend on scheduling.
"""

from __future__ import annotations

import functools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from .arith import is_prime, isqrt, legendre_table, sieve_primes, squarefree_part
from .curves import CurveFamily, RationalParam, traces_mod_p
from .errors import HypothesisError
from .paramsets import ParamSet, residue_histogram

MIN_PRIME = 5
COS_TOL = 1e-12
_SNAP_DENOMINATOR = 12


# -- target sequences and windows --------------------------------------------


@dataclass(frozen=True)
class TraceSequence:
    """Target traces a_p: constant, zero, extremal (-floor(2 sqrt p)) or a custom table."""

    kind: str
    a: int = 0
    table: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in ("constant", "zero", "extremal", "custom"):
            raise ValueError(f"unknown trace sequence kind {self.kind!r}")
        if self.kind == "zero":
            object.__setattr__(self, "a", 0)

    @classmethod
    def constant(cls, a: int) -> TraceSequence:
        return cls("constant", a)

    @classmethod
    def zero(cls) -> TraceSequence:
        return cls("zero")

    @classmethod
    def extremal(cls) -> TraceSequence:
        return cls("extremal")

    @classmethod
    def custom(cls, table: Mapping[int, int]) -> TraceSequence:
        return cls("custom", table=tuple(sorted((int(p), int(a)) for p, a in table.items())))

    def value(self, p: int) -> int | None:
        """Target a_p, or None where a custom table has no entry."""
        if self.kind == "extremal":
            return -isqrt(4 * p)
        if self.kind == "custom":
            return dict(self.table).get(p)
        return self.a

    def to_spec(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "a": self.a}
        if self.kind == "custom":
            return {"kind": "custom", "table": {str(p): a for p, a in self.table}}
        return {"kind": self.kind}


def _snap_rational(c: float) -> Fraction | None:
    fr = Fraction(c).limit_denominator(_SNAP_DENOMINATOR)
    return fr if abs(float(fr) - c) < COS_TOL else None


def _cos_at_most(a: np.ndarray, p: int, c: float, exact: Fraction | None) -> np.ndarray:
    """a / (2 sqrt p) <= c, exactly when c is a small rational."""
    if exact is None:
        return a / (2.0 * math.sqrt(p)) <= c + COS_TOL
    n, d = exact.numerator, exact.denominator
    lhs = a * d
    sq = lhs * lhs
    bound = 4 * n * n * p
    if n >= 0:
        return (lhs <= 0) | (sq <= bound)
    return (lhs < 0) & (sq >= bound)


def _cos_at_least(a: np.ndarray, p: int, c: float, exact: Fraction | None) -> np.ndarray:
    if exact is None:
        return a / (2.0 * math.sqrt(p)) >= c - COS_TOL
    return _cos_at_most(-a, p, -c, -exact)


@dataclass(frozen=True)
class AngleWindow:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 <= self.alpha < self.beta <= math.pi):
            raise ValueError(f"need 0 <= alpha < beta <= pi, got ({self.alpha}, {self.beta})")

    def _cos(self, theta: float) -> tuple[float, Fraction | None]:
        c = math.cos(theta)
        return c, _snap_rational(c)

    def angle_at_least(self, a: np.ndarray, p: int, theta: float) -> np.ndarray:
        """psi_p >= theta, i.e. cos psi_p <= cos theta."""
        c, exact = self._cos(theta)
        return _cos_at_most(np.asarray(a, dtype=np.int64), p, c, exact)

    def contains(self, a, p: int, closed: bool = True) -> np.ndarray:
        """Membership of the Frobenius angles of traces ``a`` in [alpha, beta] (or [alpha, beta))."""
        a = np.asarray(a, dtype=np.int64)
        lower = self.angle_at_least(a, p, self.alpha)
        if closed:
            c, exact = self._cos(self.beta)
            return lower & _cos_at_least(a, p, c, exact)
        return lower & ~self.angle_at_least(a, p, self.beta)


def st_density(window: AngleWindow) -> float:
    """Sato-Tate measure (2/pi) int_alpha^beta sin^2 of an angle window."""
    a, b = window.alpha, window.beta
    return ((b - a) - (math.sin(2 * b) - math.sin(2 * a)) / 2) / math.pi


def partition_edges(k: int) -> list[float]:
    return [math.pi * i / k for i in range(k + 1)]


# -- statistics ------------------------------------------------------------


@dataclass(frozen=True)
class TraceStat:
    seq: TraceSequence

    def indicator(self, a: np.ndarray, p: int) -> np.ndarray:
        target = self.seq.value(p)
        if target is None:
            return np.zeros(len(a), dtype=bool)
        return a == target


def _check_field_disc(d: int) -> None:
    if d >= 0 or squarefree_part(d) != d:
        raise ValueError(f"d={d} must be a negative squarefree integer")


@dataclass(frozen=True)
class FieldStat:
    d: int

    def __post_init__(self):
        _check_field_disc(self.d)

    def indicator(self, a: np.ndarray, p: int) -> np.ndarray:
        out = np.zeros(len(a), dtype=bool)
        for val in np.unique(a):
            if val != 0 and squarefree_part(int(val) ** 2 - 4 * p) == self.d:
                out |= a == val
        return out


@dataclass(frozen=True)
class AngleStat:
    window: AngleWindow
    closed: bool = True

    def indicator(self, a: np.ndarray, p: int) -> np.ndarray:
        return self.window.contains(a, p, self.closed)


Statistic = Union[TraceStat, FieldStat, AngleStat]


def parse_statistic(spec: dict) -> Statistic:
    kind = spec.get("stat")
    if kind == "trace":
        seq = spec.get("seq", {"kind": "zero"})
        k = seq.get("kind")
        if k == "constant":
            return TraceStat(TraceSequence.constant(int(seq["a"])))
        if k == "custom":
            return TraceStat(TraceSequence.custom({int(p): int(a) for p, a in seq["table"].items()}))
        return TraceStat(TraceSequence(k))
    if kind == "field":
        return FieldStat(int(spec["d"]))
    if kind == "angle":
        return AngleStat(AngleWindow(float(spec["alpha"]), float(spec["beta"])))
    raise ValueError(f"unknown statistic {kind!r}")


# -- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class SingleParam:
    """One specialization t = u/v of a family."""

    u: int = 1
    v: int = 1


Source = Union[SingleParam, ParamSet]


def _weighted_residues(source: Source, p: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(source, SingleParam):
        if source.v % p == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        return np.array([source.u * pow(source.v, -1, p) % p]), np.ones(1, dtype=np.int64)
    hist = residue_histogram(source, p).hist
    r = np.flatnonzero(hist)
    return r, hist[r]


def _prime_block(family: CurveFamily, source: Source, stat: Statistic, primes: list[int]) -> np.ndarray:
    """Rows (good-parameter count, contribution) for each prime of the block."""
    out = np.zeros((len(primes), 2), dtype=np.int64)
    for i, p in enumerate(primes):
        res, wts = _weighted_residues(source, p)
        if len(res) == 0:
            continue
        A, B, good = family.coefficients_mod_p(res, p)
        if not good.any():
            continue
        a = traces_mod_p(p, A[good], B[good], legendre_table(p))
        w = wts[good]
        out[i] = w.sum(), w[stat.indicator(a, p)].sum()
    return out


def _blocks(primes: list[int], n: int) -> list[list[int]]:
    """Split into n contiguous blocks with roughly equal sum of p (the per-prime cost)."""
    if n <= 1 or len(primes) <= 1:
        return [primes]
    cost = np.cumsum(primes, dtype=np.float64)
    cuts = np.searchsorted(cost, cost[-1] * np.arange(1, n) / n)
    edges = [0, *sorted(set(int(c) for c in cuts)), len(primes)]
    return [primes[a:b] for a, b in zip(edges, edges[1:]) if b > a]


def sweep(family: CurveFamily, source: Source, stat: Statistic, x: int, workers: int = 1) -> np.ndarray:
    """Per-prime rows (p, good-parameter count, contribution) for 5 <= p <= x."""
    primes = sieve_primes(max(x, 1)).between(MIN_PRIME, x)
    if not primes:
        return np.zeros((0, 3), dtype=np.int64)
    if workers <= 1:
        body = _prime_block(family, source, stat, primes)
    else:
        blocks = _blocks(primes, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_prime_block, [family] * len(blocks), [source] * len(blocks),
                                  [stat] * len(blocks), blocks))
        body = np.concatenate(parts)
    return np.column_stack([np.array(primes, dtype=np.int64), body])


@dataclass
class StatReport:
    rows: np.ndarray = field(repr=False)  # columns: p, good-parameter count, contribution
    n_params: int
    x: int
    pi_x: int
    density: float | None = None  # Sato-Tate measure, angle statistics only

    @property
    def primes(self) -> np.ndarray:
        return self.rows[:, 0]

    @property
    def contributions(self) -> np.ndarray:
        return self.rows[:, 2]

    @property
    def total(self) -> int:
        return int(self.rows[:, 2].sum())

    @property
    def avg_per_param(self) -> float:
        return self.total / self.n_params if self.n_params else 0.0

    @property
    def ratio_to_pi(self) -> float:
        return self.avg_per_param / self.pi_x if self.pi_x else 0.0

    @property
    def st_deviation(self) -> float | None:
        """avg_per_param - mu_ST * pi(x)."""
        if self.density is None:
            return None
        return self.avg_per_param - self.density * self.pi_x

    def __int__(self) -> int:
        return self.total


def _report(rows: np.ndarray, n_params: int, x: int, stat: Statistic) -> StatReport:
    pi_x = sieve_primes(max(x, 1)).count_upto(max(x, 1)) if x >= 2 else 0
    density = st_density(stat.window) if isinstance(stat, AngleStat) else None
    return StatReport(rows, n_params, x, pi_x, density)


CurveSource = Union[tuple, CurveFamily]


def _resolve(source) -> tuple[CurveFamily, SingleParam]:
    """A fixed curve (A, B), a family (specialized at 1), or (family, RationalParam)."""
    if isinstance(source, CurveFamily):
        return source, SingleParam()
    if isinstance(source, tuple) and len(source) == 2:
        first, second = source
        if isinstance(first, CurveFamily):
            t = second if isinstance(second, RationalParam) else RationalParam(int(second))
            return first, SingleParam(t.u, t.v)
        return CurveFamily.constant(int(first), int(second)), SingleParam()
    raise TypeError(f"cannot interpret curve source {source!r}")


def single_curve(source, stat: Statistic, x: int, workers: int = 1) -> StatReport:
    family, param = _resolve(source)
    if family.delta.is_zero():
        raise ValueError("singular curve over Q")
    if family.delta(Fraction(param.u, param.v)) == 0:
        raise ValueError("specialization has Delta(t) = 0")
    return _report(sweep(family, param, stat, x, workers), 1, x, stat)


def pi_trace(source, seq: TraceSequence, x: int, workers: int = 1) -> StatReport:
    return single_curve(source, TraceStat(seq), x, workers)


def pi_field(source, d: int, x: int, workers: int = 1) -> StatReport:
    return single_curve(source, FieldStat(d), x, workers)


def pi_angle(source, window: AngleWindow, x: int, workers: int = 1) -> StatReport:
    return single_curve(source, AngleStat(window), x, workers)


def single_curve_traces(source, x: int) -> tuple[np.ndarray, np.ndarray]:
    """(good primes 5 <= p <= x, their traces) for one curve."""
    family, param = _resolve(source)
    primes, traces = [], []
    for p in sieve_primes(max(x, 1)).between(MIN_PRIME, x):
        res, _ = _weighted_residues(param, p)
        if len(res) == 0:
            continue
        A, B, good = family.coefficients_mod_p(res, p)
        if good[0]:
            primes.append(p)
            traces.append(int(traces_mod_p(p, A, B)[0]))
    return np.array(primes, dtype=np.int64), np.array(traces, dtype=np.int64)


def angle_partition_counts(source, k: int, x: int) -> tuple[np.ndarray, int]:
    """Good-prime counts per cell of the uniform k-cell partition of [0, pi], and the number of good primes.

    Inner cells are half-open [a, b); the last one is closed, so the counts sum to the total.
    """
    primes, traces = single_curve_traces(source, x)
    edges = partition_edges(k)
    counts = np.zeros(k, dtype=np.int64)
    for p, a in zip(primes.tolist(), traces.tolist()):
        for i in range(k):
            win = AngleWindow(edges[i], edges[i + 1])
            if win.contains([a], p, closed=(i == k - 1))[0]:
                counts[i] += 1
                break
    return counts, len(primes)


def effective_param_count(family: CurveFamily, pset: ParamSet) -> int:
    """Parameters with Delta(t) != 0 in Q, with multiplicity."""
    return pset.size() - sum(pset.multiplicity(r) for r in family.rational_delta_roots() if r > 0)


def family_average(family: CurveFamily, pset: ParamSet, stat: Statistic, x: int, workers: int = 1) -> StatReport:
    """Sum over t in the set (Delta(t) != 0) of the single-curve statistic of E(t).

    A parameter with Delta(t) = 0 reduces into a bad fiber at every prime not
    dividing its denominator, so it never contributes; it is only removed
    from the normalization.
    """
    family.require_nondegenerate()
    n = effective_param_count(family, pset)
    if n <= 0:
        raise ValueError("parameter set has no admissible parameters")
    return _report(sweep(family, pset, stat, x, workers), n, x, stat)


# -- fiber censuses --------------------------------------------------------


@dataclass(frozen=True)
class FiberCensus:
    """Traces a_{w,p} of E(w) for every residue w with Delta(w) != 0 mod p."""

    p: int
    family: CurveFamily
    residues: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    excluded: int = 0

    @property
    def traces(self) -> dict[int, int]:
        return dict(zip(self.residues.tolist(), self.a.tolist()))

    @property
    def size(self) -> int:
        return len(self.residues)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """(good mask, traces) indexed by residue 0..p-1; traces are 0 on bad fibers."""
        good = np.zeros(self.p, dtype=bool)
        good[self.residues] = True
        a = np.zeros(self.p, dtype=np.int64)
        a[self.residues] = self.a
        return good, a


@functools.lru_cache(maxsize=64)
def fiber_census(family: CurveFamily, p: int) -> FiberCensus:
    if p < MIN_PRIME or not is_prime(p):
        raise ValueError(f"census needs a prime p >= 5, got {p}")
    family.require_nondegenerate()
    w = np.arange(p, dtype=np.int64)
    A, B, good = family.coefficients_mod_p(w, p)
    a = traces_mod_p(p, A[good], B[good])
    a.flags.writeable = False
    res = w[good]
    res.flags.writeable = False
    return FiberCensus(p, family, res, a, int(p - good.sum()))


def census_mod_ell(census: FiberCensus, a: int, ell: int) -> int:
    if ell < 17 or not is_prime(ell):
        raise HypothesisError(f"ell={ell} must be a prime >= 17")
    if ell == census.p:
        raise HypothesisError("ell must differ from p")
    return int(((census.a - a) % ell == 0).sum())


def census_field(census: FiberCensus, d: int) -> int:
    _check_field_disc(d)
    return int(FieldStat(d).indicator(census.a, census.p).sum())


def trace_class_count(census: FiberCensus, t: int) -> int:
    """Fibers with a_{w,p} = t; for the j-family each fiber is its own F_p-isomorphism class."""
    if census.family.name != "j-family":
        warnings.warn("trace_class_count is an isomorphism-class count only for the j-family", stacklevel=2)
    return int((census.a == t).sum())
