"""Chebyshev sums, semicircle discrepancy and the angle counters over parameter sets."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curves import CurveFamily
from .errors import HypothesisError
from .paramsets import ParamSet, residue_histogram
from .stats import AngleWindow, fiber_census

Z_TOL = 1e-12


def chebyshev_U(n: int, z: float) -> float:
    """U_n(z) by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if abs(z) > 1 + Z_TOL:
        raise ValueError(f"z={z} outside [-1, 1]")
    u_prev, u = 1.0, 2.0 * z
    if n == 0:
        return u_prev
    for _ in range(n - 1):
        u_prev, u = u, 2.0 * z * u - u_prev
    return u


def chebyshev_U_table(k: int, z: np.ndarray) -> np.ndarray:
    """Rows U_0(z), ..., U_k(z) for an array z."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty((k + 1, len(z)))
    out[0] = 1.0
    if k >= 1:
        out[1] = 2.0 * z
    for n in range(2, k + 1):
        out[n] = 2.0 * z * out[n - 1] - out[n - 2]
    return out


def _G_primitive(z):
    z = np.clip(z, -1.0, 1.0)
    return (z * np.sqrt(1.0 - z * z) + np.arcsin(z)) / math.pi


def semicircle_G(a: float, b: float) -> float:
    """(2/pi) int_a^b sqrt(1 - z^2) dz."""
    if not (-1.0 <= a < b <= 1.0):
        raise ValueError(f"need -1 <= a < b <= 1, got ({a}, {b})")
    return float(_G_primitive(b) - _G_primitive(a))


def _as_sample(values: Sequence[float]) -> np.ndarray:
    w = np.asarray(values, dtype=np.float64)
    if w.size and (w.min() < -1 - Z_TOL or w.max() > 1 + Z_TOL):
        raise ValueError("sample values must lie in [-1, 1]")
    return np.clip(w, -1.0, 1.0)


def interval_count_A(sample: Sequence[float], a: float, b: float) -> int:
    w = _as_sample(sample)
    return int(((w >= a) & (w <= b)).sum())


@dataclass
class DiscrepancyReport:
    lhs: float
    rhs_terms: np.ndarray = field(repr=False)  # |sum_i U_n(w_i)| for n = 1..k
    k: int
    m: int

    @property
    def rhs(self) -> float:
        n = np.arange(1, self.k + 1)
        return self.m / self.k + float((self.rhs_terms / n).sum())

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


def semicircle_discrepancy(sample: Sequence[float]) -> float:
    """sup over -1 <= a <= b <= 1 of |A([a, b]; m) - m G(a, b)|.

    With lo_j = #{w < z_j} - m G(-1, z_j) and hi_j = #{w <= z_j} - m G(-1, z_j)
    at the breakpoints z_j (distinct sample values plus +-1), the positive
    excess is max_{i <= j} hi_j - lo_i and the deficit is max_{i < j} hi_i - lo_j.
    """
    w = np.sort(_as_sample(sample))
    m = len(w)
    z = np.unique(np.concatenate([[-1.0, 1.0], w]))
    below = np.searchsorted(w, z, side="left")
    upto = np.searchsorted(w, z, side="right")
    F = m * (_G_primitive(z) + 0.5)
    F[0], F[-1] = 0.0, float(m)
    lo = below - F
    hi = upto - F
    excess = float(np.max(hi - np.minimum.accumulate(lo)))
    deficit = float(np.max(np.maximum.accumulate(hi)[:-1] - lo[1:])) if len(z) > 1 else 0.0
    return max(excess, deficit, 0.0)


def discrepancy(sample: Sequence[float], k: int) -> DiscrepancyReport:
    if k < 1:
        raise ValueError("k must be >= 1")
    w = _as_sample(sample)
    if w.size == 0:
        raise ValueError("discrepancy of an empty sample")
    sums = chebyshev_U_table(k, w)[1:].sum(axis=1)
    return DiscrepancyReport(semicircle_discrepancy(w), np.abs(sums), k, len(w))


def census_cosines(family: CurveFamily, p: int) -> tuple[np.ndarray, np.ndarray]:
    """(good residues, cos psi_p(E(w))) over the fiber census."""
    c = fiber_census(family, p)
    return c.residues, c.a / (2.0 * math.sqrt(p))


def michel_sum(family: CurveFamily, p: int, n: int, m: int) -> complex:
    """sum over good w of U_n(cos psi_p(E(w))) e_p(m w)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    w, cosines = census_cosines(family, p)
    u = chebyshev_U_table(n, cosines)[n]
    phase = np.exp(2j * np.pi * (m * w % p) / p)
    return complex((u * phase).sum())


def _check_regime(p: int, T: int, allow_small_p: bool) -> None:
    if p > T:
        return
    if not allow_small_p:
        raise HypothesisError(f"angle counters need p > T (p={p}, T={T})")
    warnings.warn(f"p={p} <= T={T}: outside the regime p > T", stacklevel=3)


def _count_in_window(family: CurveFamily, hist: np.ndarray, p: int, window: AngleWindow) -> int:
    good, a = fiber_census(family, p).dense()
    inside = good & window.contains(a, p)
    return int(hist[inside].sum())


def angle_counter_B(family: CurveFamily, T: int, p: int, window: AngleWindow,
                    allow_small_p: bool = False) -> int:
    """Pairs (r, s) in F(T)^2 with Delta(r+s) != 0 mod p and psi_p(E(r+s)) in the window."""
    _check_regime(p, T, allow_small_p)
    hist = residue_histogram(ParamSet.farey_pairs(T), p).hist
    return _count_in_window(family, hist, p, window)


def angle_counter_C(family: CurveFamily, T: int, p: int, window: AngleWindow,
                    allow_small_p: bool = False) -> int:
    """Integers t in [1, T] with Delta(t) != 0 mod p and psi_p(E(t)) in the window."""
    _check_regime(p, T, allow_small_p)
    hist = residue_histogram(ParamSet.interval(T), p).hist
    return _count_in_window(family, hist, p, window)


def angle_counter_D(family: CurveFamily, U: Sequence[int], V: Sequence[int], p: int,
                    window: AngleWindow, allow_small_p: bool = False) -> int:
    """Pairs (u, v) in U x V with Delta(u+v) != 0 mod p and psi_p(E(u+v)) in the window."""
    pset = ParamSet.sumset(U, V)
    _check_regime(p, pset.T, allow_small_p)
    hist = residue_histogram(pset, p).hist
    return _count_in_window(family, hist, p, window)
