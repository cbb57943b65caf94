import math
from collections import Counter
from fractions import Fraction
from itertools import islice

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frobenius_lab import oracles
from frobenius_lab.arith import sieve_primes
from frobenius_lab.paramsets import (
    ParamSet,
    additive_energy_V,
    coincidence_count_Q,
    cyclic_self_convolution,
    farey_count,
    farey_enumerate,
    farey_expsum,
    farey_expsums,
    parse_paramset,
    residue_histogram,
    sumset_enumerate,
)

SMALL_PRIMES = sieve_primes(60).between(2, 60)


def test_farey_enumerate_small():
    assert [(r.u, r.v) for r in farey_enumerate(1)] == [(1, 1)]
    assert sorted((r.u, r.v) for r in farey_enumerate(2)) == [(1, 1), (1, 2), (2, 1)]
    assert farey_count(1) == 1
    assert farey_count(2) == 3


def test_farey_count_100():
    brute = len(oracles.farey_pairs_naive(100))
    assert farey_count(100) == brute == 6087
    assert abs(brute / (6 / math.pi**2 * 10**4) - 1) < 0.02


def test_farey_stream_is_prefix():
    short = list(farey_enumerate(12))
    assert list(islice(farey_enumerate(40), len(short))) == short
    assert len(set(short)) == len(short) == farey_count(12)


def test_histogram_examples():
    assert residue_histogram(ParamSet.farey(2), 5).counts == {1: 1, 2: 1, 3: 1}
    h = residue_histogram(ParamSet.farey(2), 2)
    assert h.counts == {0: 1, 1: 1} and h.skipped == 1
    assert residue_histogram(ParamSet.interval(3), 2).counts == {0: 1, 1: 2}


@given(st.integers(1, 40), st.sampled_from(SMALL_PRIMES))
def test_farey_histogram_mass(T, p):
    h = residue_histogram(ParamSet.farey(T), p)
    assert h.total + h.skipped == farey_count(T)


def test_Q_examples():
    assert coincidence_count_Q(1, 7) == 1
    assert coincidence_count_Q(2, 5) == 3
    assert coincidence_count_Q(30, 101) == oracles.coincidence_count_naive(30, 101)


def test_V_examples():
    assert additive_energy_V(1, 11) == 1
    assert additive_energy_V(2, 5) == 19
    assert additive_energy_V(6, 31) == oracles.additive_energy_naive(6, 31)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.sampled_from(SMALL_PRIMES))
def test_Q_V_match_brute_force(T, p):
    assert coincidence_count_Q(T, p) == oracles.coincidence_count_naive(T, p)
    if T <= 5:
        assert additive_energy_V(T, p) == oracles.additive_energy_naive(T, p)


def test_expsum_examples():
    assert farey_expsum(7, 5, 0) == residue_histogram(ParamSet.farey(7), 5).total
    assert abs(farey_expsum(1, 13, 4)) == pytest.approx(1.0)
    assert abs(farey_expsum(2, 5, 1)) == pytest.approx(2 * math.cos(math.pi / 5), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 25), st.sampled_from(sieve_primes(200).between(2, 200)), st.integers(-500, 500))
def test_expsum_matches_direct_sum(T, p, m):
    assert farey_expsum(T, p, m) == pytest.approx(oracles.expsum_naive(T, p, m), abs=1e-8)
    assert farey_expsums(T, p)[m % p] == pytest.approx(farey_expsum(T, p, m), abs=1e-8)


@pytest.mark.parametrize("T,p", [(1, 3), (7, 11), (20, 97), (35, 211), (50, 499)])
def test_parseval(T, p):
    S2 = np.abs(farey_expsums(T, p)) ** 2
    assert S2.sum() == pytest.approx(p * coincidence_count_Q(T, p), rel=1e-6)
    assert (S2**2).sum() == pytest.approx(p * additive_energy_V(T, p), rel=1e-6)


def test_sumset_examples():
    assert list(sumset_enumerate([1], [1])) == [2]
    assert sorted(sumset_enumerate([1, 2], [1])) == [2, 3]
    assert sorted(sumset_enumerate([1, 2], [1, 2])) == [2, 3, 3, 4]
    with pytest.raises(ValueError):
        list(sumset_enumerate([], [1]))


@given(st.lists(st.integers(1, 60), min_size=1, max_size=12),
       st.lists(st.integers(1, 60), min_size=1, max_size=12),
       st.sampled_from(SMALL_PRIMES))
def test_sumset_histogram_matches_enumeration(U, V, p):
    want = Counter(s % p for s in sumset_enumerate(U, V))
    assert residue_histogram(ParamSet.sumset(U, V), p).counts == dict(want)


@given(st.integers(1, 9), st.sampled_from(SMALL_PRIMES))
def test_farey_pairs_histogram(T, p):
    F = [Fraction(u, v) for u, v in oracles.farey_pairs_naive(T)]
    want = Counter()
    skipped = 0
    for r in F:
        for s in F:
            if r.denominator % p and s.denominator % p:
                want[(r.numerator * pow(r.denominator, -1, p) + s.numerator * pow(s.denominator, -1, p)) % p] += 1
            else:
                skipped += 1
    h = residue_histogram(ParamSet.farey_pairs(T), p)
    assert h.counts == dict(want)
    assert h.skipped == skipped


def test_multiplicity():
    pairs = ParamSet.farey_pairs(3)
    # 2 = 1 + 1 = 1/2 + 3/2 = 3/2 + 1/2
    assert pairs.multiplicity(Fraction(2)) == 3
    assert pairs.size() == farey_count(3) ** 2
    assert ParamSet.interval(10).multiplicity(Fraction(3, 2)) == 0
    assert ParamSet.sumset([1, 2], [1, 2]).multiplicity(Fraction(3)) == 2


def test_convolution_matches_direct():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 5, 23)
    b = rng.integers(0, 5, 23)
    want = np.array([sum(a[r] * b[(s - r) % 23] for r in range(23)) for s in range(23)])
    assert np.array_equal(cyclic_self_convolution(a, b), want)


def test_parse_paramset(tmp_path):
    (tmp_path / "u.txt").write_text("1\n2\n\n3\n")
    ps = parse_paramset({"kind": "sumset", "U_file": "u.txt", "V": [4]}, tmp_path)
    assert ps.U == (1, 2, 3) and ps.V == (4,)
    assert parse_paramset({"kind": "farey", "T": 5}) == ParamSet.farey(5)
    with pytest.raises(ValueError):
        parse_paramset({"kind": "nope", "T": 5})


def test_energy_main_term_diagnostic():
    # main term from the m = 0 exponential sum, i.e. only fractions with p not dividing v
    pl = sieve_primes(10**4)
    primes = sorted({int(pl.primes[np.searchsorted(pl.primes, int(q))]) for q in np.geomspace(2, 9973, 12)})
    worst = 0.0
    for T in (10, 25, 50, 100):
        for p in primes:
            n = residue_histogram(ParamSet.farey(T), p).total
            err = abs(additive_energy_V(T, p) - n**4 / p)
            worst = max(worst, err / (T**4 * (T * p) ** 0.1))
    print(f"recorded C for |V - n^4/p| <= C T^4 (Tp)^0.1: {worst:.3f}")
    assert worst <= 10
