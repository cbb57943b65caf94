import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, optimize

from frobenius_lab import oracles
from frobenius_lab.curves import j_family
from frobenius_lab.errors import HypothesisError
from frobenius_lab.harmonic import (
    angle_counter_B,
    angle_counter_C,
    angle_counter_D,
    chebyshev_U,
    discrepancy,
    interval_count_A,
    michel_sum,
    semicircle_discrepancy,
    semicircle_G,
)
from frobenius_lab.stats import AngleWindow, fiber_census, st_density

FULL = AngleWindow(0, math.pi)


def test_chebyshev_examples():
    assert chebyshev_U(0, 0.3) == 1
    assert chebyshev_U(1, 0.5) == 1
    assert chebyshev_U(3, math.cos(math.pi / 2)) == pytest.approx(0, abs=1e-15)
    assert chebyshev_U(5, 1.0) == 6
    with pytest.raises(ValueError):
        chebyshev_U(2, 1.5)


@given(st.integers(0, 50), st.floats(1e-3, math.pi - 1e-3))
def test_chebyshev_matches_sine_quotient(n, theta):
    want = math.sin((n + 1) * theta) / math.sin(theta)
    assert abs(chebyshev_U(n, math.cos(theta)) - want) <= 1e-8


def test_semicircle_examples():
    assert semicircle_G(-1, 1) == pytest.approx(1, abs=1e-15)
    assert semicircle_G(0, 1) == pytest.approx(0.5, abs=1e-15)
    assert semicircle_G(0, 0.5) == pytest.approx(0.30450, abs=5e-6)
    want, _ = integrate.quad(lambda z: 2 / math.pi * math.sqrt(1 - z * z), 0, 0.5)
    assert semicircle_G(0, 0.5) == pytest.approx(want, abs=1e-12)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_semicircle_matches_angle_density(a, b):
    a, b = sorted((a, b))
    if b - a < 1e-9:
        return
    assert semicircle_G(a, b) == pytest.approx(st_density(AngleWindow(math.acos(b), math.acos(a))), abs=1e-10)


def test_interval_count_examples():
    assert interval_count_A([0, 0], -1, 1) == 2
    assert interval_count_A([], -1, 1) == 0
    assert interval_count_A([-0.5, 0, 0.5], 0, 1) == 2


def test_discrepancy_of_repeated_point():
    rep = discrepancy([0.0] * 10, 3)
    # [-1, 1] deviates by 0; the worst interval is the single point 0
    assert rep.lhs == pytest.approx(10)
    assert abs(10 - 10 * semicircle_G(-1, 1)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1).map(lambda z: round(z, 2)), min_size=1, max_size=25))
def test_discrepancy_matches_scan(sample):
    assert semicircle_discrepancy(sample) == pytest.approx(oracles.discrepancy_naive(sample), abs=1e-6)


def _semicircle_quantiles(m: int) -> np.ndarray:
    cdf = lambda z: semicircle_G(-1, z) if z > -1 else 0.0  # noqa: E731
    return np.array([optimize.brentq(lambda z: cdf(z) - (i + 0.5) / m, -1, 1, xtol=1e-14) for i in range(m)])


def test_quantile_sample_has_small_discrepancy():
    w = _semicircle_quantiles(1000)
    rep = discrepancy(w, 20)
    assert rep.lhs <= 1.0 + 1e-6
    assert rep.lhs <= rep.rhs


def test_niederreiter_ratio_over_random_samples():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 10_001))
        # half the samples follow the semicircle law, half are uniform
        if rng.random() < 0.5:
            w = np.cos(_sample_st_angles(rng, m))
        else:
            w = rng.uniform(-1, 1, m)
        for k in (1, 5, 20):
            worst = max(worst, discrepancy(w, k).ratio)
    print(f"max lhs/rhs over 100 samples, k in (1, 5, 20): {worst:.3f}")
    assert worst <= 20


def _sample_st_angles(rng, m):
    out = np.empty(0)
    while len(out) < m:
        theta = rng.uniform(0, math.pi, 2 * m)
        keep = rng.uniform(0, 1, 2 * m) < np.sin(theta) ** 2
        out = np.concatenate([out, theta[keep]])
    return out[:m]


def test_michel_examples():
    fam = j_family()
    assert abs(michel_sum(fam, 5, 1, 0)) < 1e-12
    for p in (7, 31, 101):
        for n in (1, 4):
            s0 = michel_sum(fam, p, n, 0)
            assert abs(s0.imag) < 1e-9
            assert abs(michel_sum(fam, p, n, 3)) <= (n + 1) * p


def test_michel_matches_direct_sum():
    fam, p, n, m = j_family(), 37, 3, 5
    c = fiber_census(fam, p)
    want = sum(
        math.sin((n + 1) * math.acos(a / (2 * math.sqrt(p)))) / math.sin(math.acos(a / (2 * math.sqrt(p))))
        * complex(math.cos(2 * math.pi * m * w / p), math.sin(2 * math.pi * m * w / p))
        for w, a in c.traces.items()
    )
    assert michel_sum(fam, p, n, m) == pytest.approx(want, abs=1e-8)


def test_counter_B_examples():
    fam = j_family()
    # T = 1: the single parameter 1 + 1 = 2, good at 7 since 2 is neither 0 nor 1728 = 6 mod 7
    assert angle_counter_B(fam, 1, 7, FULL) == 1
    assert angle_counter_B(fam, 8, 31, AngleWindow(0.9, 2.2)) == oracles.angle_counter_B_naive(fam, 8, 31, 0.9, 2.2)


def test_counter_C_examples():
    fam = j_family()
    with pytest.raises(HypothesisError):
        angle_counter_C(fam, 5, 5, FULL)
    with pytest.warns(UserWarning):
        angle_counter_C(fam, 5, 5, FULL, allow_small_p=True)
    good = fiber_census(fam, 7).residues.tolist()
    assert angle_counter_C(fam, 4, 7, FULL) == sum(1 for t in range(1, 5) if t in good)
    tiny = AngleWindow(1.0, 1.0 + 1e-15)
    assert angle_counter_C(fam, 6, 7, tiny) == 0


def test_counter_D_examples():
    fam = j_family()
    assert angle_counter_D(fam, [1], [1], 7, FULL) == angle_counter_B(fam, 1, 7, FULL)
    good = set(fiber_census(fam, 7).residues.tolist())
    assert angle_counter_D(fam, [1, 2], [1], 7, FULL) == len({2, 3} & good)
    U, V = [1, 3, 4], [2, 5]
    assert angle_counter_D(fam, U, V, 11, FULL) == sum(1 for u in U for v in V if (u + v) % 11 in good_at(fam, 11))


def good_at(fam, p):
    return set(fiber_census(fam, p).residues.tolist())


@pytest.mark.parametrize("T,p", [(3, 5), (6, 13), (8, 29)])
def test_full_window_counts_good_parameters(T, p):
    fam = j_family()
    good = good_at(fam, p)
    assert angle_counter_C(fam, T, p, FULL) == sum(1 for t in range(1, T + 1) if t % p in good)
    pairs = oracles.farey_pairs_naive(T)
    res = [u * pow(v, -1, p) % p for u, v in pairs if v % p]
    assert angle_counter_B(fam, T, p, FULL) == sum(1 for r in res for s in res if (r + s) % p in good)
