"""Acceptance checks, grouped into named suites that write a JSON manifest."""

from __future__ import annotations

import json
import logging
import math
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import oracles
from .arith import sieve_primes
from .curves import CurveModP, frobenius_field_disc, j_family, trace, trace_naive, traces_mod_p
from .harmonic import angle_counter_B, angle_counter_C, angle_counter_D, michel_sum
from .paramsets import (
    ParamSet,
    additive_energy_V,
    coincidence_count_Q,
    farey_arrays,
    farey_count,
    farey_enumerate,
    farey_expsums,
    farey_residues,
)
from .runner import preset_config, run_experiment
from .stats import (
    AngleStat,
    AngleWindow,
    angle_partition_counts,
    census_mod_ell,
    family_average,
    fiber_census,
    partition_edges,
    pi_trace,
    single_curve_traces,
    st_density,
    TraceSequence,
)

log = logging.getLogger(__name__)

SEED = 20240611
ST_MIDDLE_THIRD = 0.60900  # mu_ST(pi/3, 2pi/3) to five places


@dataclass
class CheckResult:
    cid: str
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.cid}: {self.name} {self.details}"


def _combine(cid: str, name: str, *parts: CheckResult) -> CheckResult:
    return CheckResult(cid, name, all(p.passed for p in parts), {p.cid: p.details for p in parts})


def _nonsingular_pairs(rng: np.random.Generator, p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    A = np.empty(0, dtype=np.int64)
    B = np.empty(0, dtype=np.int64)
    while len(A) < k:
        a = rng.integers(0, p, 2 * k)
        b = rng.integers(0, p, 2 * k)
        ok = (4 * a**3 + 27 * b**2) % p != 0
        A, B = np.concatenate([A, a[ok]]), np.concatenate([B, b[ok]])
    return A[:k], B[:k]


# -- 1, 2: traces ----------------------------------------------------------


def check_trace_oracle(seed: int = SEED, per_prime: int = 50, limit: int = 200) -> CheckResult:
    rng = np.random.default_rng(seed)
    mismatches, checked = [], 0
    for p in sieve_primes(limit).between(5, limit - 1):
        A, B = _nonsingular_pairs(rng, p, per_prime)
        for a, b in zip(A.tolist(), B.tolist()):
            c = CurveModP(p, a, b)
            checked += 1
            if trace(c) != trace_naive(c):
                mismatches.append((p, a, b))
    return CheckResult("1", "trace equals point count", not mismatches,
                       {"curves": checked, "mismatches": mismatches[:5]})


def check_hasse(seed: int = SEED, n: int = 100_000, limit: int = 10_000) -> CheckResult:
    rng = np.random.default_rng(seed)
    primes = np.array(sieve_primes(limit).between(5, limit))
    pick = rng.choice(primes, n)
    ps, counts = np.unique(pick, return_counts=True)
    worst, violations = 0.0, 0
    for p, k in zip(ps.tolist(), counts.tolist()):
        A, B = _nonsingular_pairs(rng, p, k)
        a = traces_mod_p(p, A, B)
        violations += int((a * a > 4 * p).sum())
        worst = max(worst, float((a * a).max()) / (4 * p))
    return CheckResult("2", "Hasse bound", violations == 0,
                       {"curves": n, "violations": violations, "max_a2_over_4p": worst})


# -- 3, 4, 5: single curves ------------------------------------------------


def check_deuring(x: int = 100_000) -> CheckResult:
    rep = pi_trace((1, 0), TraceSequence.zero(), x)
    r = rep.ratio_to_pi
    return CheckResult("3", "supersingular ratio of Y^2=X^3+X", 0.45 <= r <= 0.55,
                       {"x": x, "count": rep.total, "pi_x": rep.pi_x, "ratio": r, "band": [0.45, 0.55]})


def check_cm_field(x: int = 10_000) -> CheckResult:
    primes, traces = single_curve_traces((1, 0), x)
    discs = {frobenius_field_disc(a, p) for p, a in zip(primes.tolist(), traces.tolist()) if a}
    ordinary = int((traces != 0).sum())
    return CheckResult("4", "Frobenius field of Y^2=X^3+X", discs == {-1},
                       {"x": x, "ordinary_primes": ordinary, "fields": sorted(discs)})


def check_st_single(x: int = 100_000, k: int = 8, tol: float = 0.02) -> CheckResult:
    counts, good = angle_partition_counts((1, 1), k, x)
    edges = partition_edges(k)
    mu = np.array([st_density(AngleWindow(a, b)) for a, b in zip(edges, edges[1:])])
    dev = float(np.abs(counts / good - mu).max())
    return CheckResult("5", "angle partition of Y^2=X^3+X+1", dev < tol,
                       {"x": x, "good_primes": good, "counts": counts.tolist(), "max_dev": dev, "tol": tol})


# -- 6: density ------------------------------------------------------------


def check_st_density(seed: int = SEED, n: int = 100, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a, b = np.sort(rng.uniform(0, math.pi, 2))
        worst = max(worst, abs(st_density(AngleWindow(a, b)) - oracles.st_density_quadrature(a, b)))
    worst = float(worst)
    middle = oracles.st_density_quadrature(math.pi / 3, 2 * math.pi / 3)
    ok = worst < tol and abs(middle - ST_MIDDLE_THIRD) < 5e-6
    return CheckResult("6", "density closed form vs quadrature", ok,
                       {"windows": n, "max_err": worst, "middle_third": middle})


# -- 7, 8: Farey congruence counts ----------------------------------------


def check_Q_exact(T_max: int = 30, p_max: int = 101) -> CheckResult:
    bad = [(T, p) for T in range(1, T_max + 1) for p in sieve_primes(p_max).between(2, p_max)
           if coincidence_count_Q(T, p) != oracles.coincidence_count_naive(T, p)]
    return CheckResult("7a", "Q histogram vs double loop", not bad, {"mismatches": bad[:5]})


def _Q_by_height(p: int, T_max: int) -> np.ndarray:
    """Q_{T,p} for T = 1..T_max from one pass over F(T_max) in height order."""
    u, v = farey_arrays(T_max)
    res, _ = farey_residues(T_max, p)
    height = np.maximum(u, v)[v % p != 0]
    order = np.argsort(height, kind="stable")
    res, height = res[order], height[order]
    hist = np.zeros(p, dtype=np.int64)
    out = np.zeros(T_max + 1, dtype=np.int64)
    q = 0
    bounds = np.searchsorted(height, np.arange(1, T_max + 2))
    for T in range(1, T_max + 1):
        shell = res[bounds[T - 1] : bounds[T]]
        r, c = np.unique(shell, return_counts=True)
        q += int((2 * hist[r] * c + c * c).sum())
        hist[r] += c
        out[T] = q
    return out


def check_Q_diagnostic(T_lo: int = 10, T_hi: int = 100, p_max: int = 10_000, cap: float = 10.0) -> CheckResult:
    T = np.arange(T_lo, T_hi + 1)
    worst, where = 0.0, None
    for p in sieve_primes(p_max).between(2, p_max):
        q = _Q_by_height(p, T_hi)[T_lo:]
        ratio = q * np.minimum(p, T * T) / T.astype(np.float64) ** 4
        i = int(ratio.argmax())
        if ratio[i] > worst:
            worst, where = float(ratio[i]), (int(T[i]), p)
    return CheckResult("7b", "Q min(p,T^2)/T^4 on the grid", worst <= cap,
                       {"max_ratio": worst, "at_T_p": where, "cap": cap})


def check_V_exact(T_max: int = 6, p_max: int = 31) -> CheckResult:
    bad = [(T, p) for T in range(1, T_max + 1) for p in sieve_primes(p_max).between(2, p_max)
           if additive_energy_V(T, p) != oracles.additive_energy_naive(T, p)]
    return CheckResult("8a", "V convolution vs quadruple loop", not bad, {"mismatches": bad[:5]})


def check_parseval(T_max: int = 50, p_max: int = 499, rtol: float = 1e-6) -> CheckResult:
    worst2 = worst4 = 0.0
    for p in sieve_primes(p_max).between(2, p_max):
        for T in range(1, T_max + 1):
            S2 = np.abs(farey_expsums(T, p)) ** 2
            Q, V = coincidence_count_Q(T, p), additive_energy_V(T, p)
            if Q == 0:
                continue
            worst2 = max(worst2, float(abs(S2.sum() - p * Q) / (p * Q)))
            worst4 = max(worst4, float(abs((S2 * S2).sum() - p * V) / (p * V)))
    return CheckResult("8b", "Parseval for Farey exponential sums", max(worst2, worst4) <= rtol,
                       {"second_moment_rel_err": worst2, "fourth_moment_rel_err": worst4})


def check_Q(**kw) -> CheckResult:
    return _combine("7", "coincidence count Q", check_Q_exact(), check_Q_diagnostic(**kw))


def check_V(**kw) -> CheckResult:
    return _combine("8", "additive energy V", check_V_exact(), check_parseval(**kw))


# -- 9, 10: fiber censuses -------------------------------------------------


def check_census_ell(primes=(1009, 2003), ell: int = 17) -> CheckResult:
    fam = j_family()
    ok, details = True, {}
    for p in primes:
        c = fiber_census(fam, p)
        dev = max(abs(census_mod_ell(c, a, ell) - c.size / ell) for a in range(ell))
        bound = 3 * ell * math.sqrt(p)
        ok &= dev <= bound
        details[p] = {"max_dev": dev, "bound": bound}
    return CheckResult("9", "census equidistribution mod 17", ok, details)


def check_michel(p_max: int = 500, n_max: int = 8, ms=(0, 1, 2), cap: float = 5.0) -> CheckResult:
    fam = j_family()
    worst, where = 0.0, None
    for p in sieve_primes(p_max).between(5, p_max):
        for n in range(1, n_max + 1):
            for m in ms:
                r = abs(michel_sum(fam, p, n, m)) / (n * math.sqrt(p))
                if r > worst:
                    worst, where = r, (p, n, m)
    # U_1(cos psi) = a / sqrt(p), so S(5, 1, 0) vanishes exactly when the traces sum to zero.
    exact_zero = int(fiber_census(fam, 5).a.sum()) == 0
    small = abs(michel_sum(fam, 5, 1, 0)) < 1e-12
    return CheckResult("10", "Chebyshev-twisted census sums", worst <= cap and exact_zero and small,
                       {"max_ratio": worst, "at_p_n_m": where, "S_5_1_0_zero": exact_zero and small})


# -- 11: angle counters ----------------------------------------------------

_WINDOWS = [(0.0, math.pi), (math.pi / 3, 2 * math.pi / 3), (0.9, 2.2)]


def check_counters(seed: int = SEED) -> CheckResult:
    fam = j_family()
    rng = np.random.default_rng(seed)
    bad, checked = [], 0
    traces = oracles.TraceCache()
    primes = sieve_primes(31).between(5, 31)
    for alpha, beta in _WINDOWS:
        win = AngleWindow(alpha, beta)
        for p in primes:
            for T in range(1, min(8, p - 1) + 1):
                checked += 1
                if angle_counter_B(fam, T, p, win) != oracles.angle_counter_B_naive(fam, T, p, alpha, beta, traces):
                    bad.append(("B", T, p, alpha))
            for T in range(1, p):
                checked += 1
                if angle_counter_C(fam, T, p, win) != oracles.angle_counter_C_naive(fam, T, p, alpha, beta, traces):
                    bad.append(("C", T, p, alpha))
            for _ in range(3):
                top = int(rng.integers(1, min(8, p - 1) + 1))
                U = sorted(set(rng.integers(1, top + 1, 4).tolist()))
                V = sorted(set(rng.integers(1, top + 1, 4).tolist()))
                checked += 1
                got = angle_counter_D(fam, U, V, p, win)
                if got != oracles.angle_counter_D_naive(fam, U, V, p, alpha, beta, traces):
                    bad.append(("D", tuple(U), tuple(V), p, alpha))
    return CheckResult("11", "angle counters vs direct loops", not bad, {"cases": checked, "mismatches": bad[:5]})


# -- 12: sum-set average ---------------------------------------------------


def check_st_setsum(x: int = 10_000, size: int = 40, tol: float = 0.03) -> CheckResult:
    I = list(range(1, size + 1))
    rep = family_average(j_family(), ParamSet.sumset(I, I), AngleStat(AngleWindow(math.pi / 3, 2 * math.pi / 3)), x)
    r = rep.ratio_to_pi
    return CheckResult("12", "j-family sum-set angle average", abs(r - ST_MIDDLE_THIRD) <= tol,
                       {"x": x, "avg_over_pi": r, "target": ST_MIDDLE_THIRD, "tol": tol})


# -- 13: Farey counts ------------------------------------------------------


def check_farey_count(T_stream: int = 500, T_ratio: int = 1000) -> CheckResult:
    per_height = np.zeros(T_stream + 1, dtype=np.int64)
    for r in farey_enumerate(T_stream):
        per_height[max(r.u, r.v)] += 1
    streamed = np.cumsum(per_height)
    bad = [T for T in range(1, T_stream + 1) if streamed[T] != farey_count(T)]
    n = farey_count(T_ratio)
    ratio = n * math.pi**2 / (6 * T_ratio**2)
    return CheckResult("13", "Farey set size", not bad and abs(ratio - 1) <= 0.02,
                       {"F_1000": n, "ratio": ratio, "stream_mismatches": bad[:5]})


# -- 14: determinism -------------------------------------------------------


def _strip_wall_time(text: str) -> dict:
    doc = json.loads(text)
    doc.pop("elapsed_ms", None)
    return doc


def check_determinism(x: int = 1000, workers=(1, 4)) -> CheckResult:
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for w in workers:
            out = Path(tmp) / f"w{w}"
            status = run_experiment(preset_config("st-setsum", x=x, out=out, workers=w))
            if status:
                return CheckResult("14", "worker-count determinism", False, {"exit": status, "workers": w})
            outputs.append(((out / "st-setsum.csv").read_bytes(), _strip_wall_time((out / "st-setsum.json").read_text())))
    same = all(o == outputs[0] for o in outputs[1:])
    return CheckResult("14", "worker-count determinism", same, {"x": x, "workers": list(workers)})


# -- suites ----------------------------------------------------------------

CRITERIA: dict[str, Callable[[], CheckResult]] = {
    "1": check_trace_oracle,
    "2": check_hasse,
    "3": check_deuring,
    "4": check_cm_field,
    "5": check_st_single,
    "6": check_st_density,
    "7": check_Q,
    "8": check_V,
    "9": check_census_ell,
    "10": check_michel,
    "11": check_counters,
    "12": check_st_setsum,
    "13": check_farey_count,
    "14": check_determinism,
}

SUITES: dict[str, list[Callable[[], CheckResult]]] = {
    "oracle": [check_trace_oracle, check_hasse, check_Q_exact, check_V_exact, check_counters, check_farey_count],
    "identities": [check_cm_field, check_st_density, check_parseval],
    "lemmas": [check_Q_diagnostic, check_census_ell, check_michel],
    "theorems": [check_deuring, check_st_single, check_st_setsum, check_determinism],
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def run_suite(name: str, out_dir: str | Path = ".") -> int:
    """Run a suite, write suite-<name>.json, return 0 if every check passed, 1 otherwise, 2 for an unknown name."""
    if name not in SUITES:
        log.error("unknown suite %r; choose from %s", name, sorted(SUITES))
        return 2
    results = []
    for check in SUITES[name]:
        res = check()
        log.info(res.line())
        print(res.line())
        results.append(res)
    manifest = {"suite": name, "passed": all(r.passed for r in results), "checks": [_jsonable(asdict(r)) for r in results]}
    path = Path(out_dir) / f"suite-{name}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0 if manifest["passed"] else 1
