"""One test per acceptance criterion; tolerances are pinned here, not taken from defaults."""

from frobenius_lab import suites


def test_criterion_01_trace_oracle(record_criterion):
    res = record_criterion(suites.check_trace_oracle(per_prime=50, limit=200))
    assert res.passed, res.details


def test_criterion_02_hasse_bound(record_criterion):
    res = record_criterion(suites.check_hasse(n=100_000, limit=10_000))
    assert res.passed, res.details


def test_criterion_03_supersingular_ratio(record_criterion):
    res = record_criterion(suites.check_deuring(x=100_000))
    assert 0.45 <= res.details["ratio"] <= 0.55
    assert res.passed


def test_criterion_04_cm_field(record_criterion):
    res = record_criterion(suites.check_cm_field(x=10_000))
    assert res.details["fields"] == [-1]
    assert res.passed


def test_criterion_05_angle_partition(record_criterion):
    res = record_criterion(suites.check_st_single(x=100_000, k=8, tol=0.02))
    assert res.details["max_dev"] < 0.02
    assert res.passed


def test_criterion_06_density_vs_quadrature(record_criterion):
    res = record_criterion(suites.check_st_density(n=100, tol=1e-10))
    assert res.details["max_err"] < 1e-10
    assert res.passed


def test_criterion_07_coincidence_count(record_criterion):
    res = record_criterion(suites.check_Q(T_lo=10, T_hi=100, p_max=10_000, cap=10.0))
    assert res.details["7b"]["max_ratio"] <= 10
    assert res.passed, res.details


def test_criterion_08_additive_energy(record_criterion):
    res = record_criterion(suites.check_V(T_max=50, p_max=499, rtol=1e-6))
    assert res.passed, res.details


def test_criterion_09_census_mod_17(record_criterion):
    res = record_criterion(suites.check_census_ell(primes=(1009, 2003), ell=17))
    assert res.passed, res.details


def test_criterion_10_chebyshev_census_sums(record_criterion):
    res = record_criterion(suites.check_michel(p_max=500, n_max=8, ms=(0, 1, 2), cap=5.0))
    assert res.details["max_ratio"] <= 5
    assert res.passed, res.details


def test_criterion_11_angle_counters(record_criterion):
    res = record_criterion(suites.check_counters())
    assert res.passed, res.details


def test_criterion_12_sumset_angle_average(record_criterion):
    res = record_criterion(suites.check_st_setsum(x=10_000, size=40, tol=0.03))
    assert abs(res.details["avg_over_pi"] - 0.60900) <= 0.03
    assert res.passed


def test_criterion_13_farey_count(record_criterion):
    res = record_criterion(suites.check_farey_count(T_stream=500, T_ratio=1000))
    assert abs(res.details["ratio"] - 1) <= 0.02
    assert res.passed, res.details


def test_criterion_14_worker_determinism(record_criterion):
    res = record_criterion(suites.check_determinism(x=1000, workers=(1, 4)))
    assert res.passed, res.details
