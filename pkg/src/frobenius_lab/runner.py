"""Config-driven experiments: one CSV of per-prime rows plus a JSON summary."""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .arith import sieve_primes
from .curves import CurveFamily, parse_family
from .errors import ConfigError, DegenerateFamilyError, HypothesisError
from .paramsets import ParamSet, parse_paramset
from .stats import (
    MIN_PRIME,
    AngleStat,
    FieldStat,
    StatReport,
    TraceStat,
    census_mod_ell,
    family_average,
    fiber_census,
    parse_statistic,
    single_curve,
    st_density,
)

log = logging.getLogger(__name__)

CSV_HEADER = "p,param_count,contribution,cumulative,pi_p,expected"
DEFAULT_CENSUS_CAP = 5000

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_HYPOTHESIS = 4

_GENERIC = {"f": [0, 1], "g": [1]}  # Y^2 = X^3 + Z X + 1
_J = {"preset": "j-family"}
_MIDDLE_THIRD = {"stat": "angle", "alpha": math.pi / 3, "beta": 2 * math.pi / 3}

PRESETS: dict[str, dict[str, Any]] = {
    "deuring-cm": {
        "family": {"curve": [1, 0]},
        "statistic": {"stat": "trace", "seq": {"kind": "zero"}},
        "x": 100_000,
    },
    "lt-ab": {"family": _GENERIC, "paramset": {"kind": "farey", "T": 20},
              "statistic": {"stat": "trace", "seq": {"kind": "constant", "a": 2}}, "x": 10_000},
    "lt-j": {"family": _J, "paramset": {"kind": "farey", "T": 20},
             "statistic": {"stat": "trace", "seq": {"kind": "zero"}}, "x": 10_000},
    "lt-ab-pairs": {"family": _GENERIC, "paramset": {"kind": "farey_pairs", "T": 8},
                    "statistic": {"stat": "trace", "seq": {"kind": "constant", "a": 2}}, "x": 10_000},
    "lt-k": {"family": _GENERIC, "paramset": {"kind": "farey", "T": 20},
             "statistic": {"stat": "field", "d": -1}, "x": 10_000},
    "lt-k-pairs": {"family": _GENERIC, "paramset": {"kind": "farey_pairs", "T": 8},
                   "statistic": {"stat": "field", "d": -1}, "x": 10_000},
    "st-farey": {"family": _GENERIC, "paramset": {"kind": "farey_pairs", "T": 10},
                 "statistic": _MIDDLE_THIRD, "x": 10_000},
    "lt-i": {"family": _GENERIC, "paramset": {"kind": "interval", "T": 200},
             "statistic": {"stat": "trace", "seq": {"kind": "constant", "a": 2}}, "x": 10_000},
    "lt-setsum": {"family": _GENERIC, "paramset": {"kind": "sumset", "U": list(range(1, 41)), "V": list(range(1, 41))},
                  "statistic": {"stat": "trace", "seq": {"kind": "constant", "a": 2}}, "x": 10_000},
    "lt-ki": {"family": _GENERIC, "paramset": {"kind": "interval", "T": 200},
              "statistic": {"stat": "field", "d": -1}, "x": 10_000},
    "st-setsum": {"family": _J, "paramset": {"kind": "sumset", "U": list(range(1, 41)), "V": list(range(1, 41))},
                  "statistic": _MIDDLE_THIRD, "x": 10_000},
}


@dataclass
class ExperimentConfig:
    family: dict
    statistic: dict
    x: int
    paramset: dict | None = None
    census_cap: int = DEFAULT_CENSUS_CAP
    workers: int = 1
    csv_path: Path | None = None
    json_path: Path | None = None
    seed: int = 0
    name: str = "experiment"
    base_dir: Path = field(default=Path("."), repr=False)

    def __post_init__(self):
        if not isinstance(self.x, int) or self.x < MIN_PRIME:
            raise ConfigError(f"x must be an integer >= {MIN_PRIME}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.census_cap = min(self.census_cap, self.x)

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> ExperimentConfig:
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        known = {"family", "statistic", "x", "paramset", "census_cap", "workers", "csv", "json", "seed", "name", "preset"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "preset" in doc:
            merged = dict(PRESETS.get(doc["preset"]) or _bad_preset(doc["preset"]))
            merged.update({k: v for k, v in doc.items() if k != "preset"})
            merged.setdefault("name", doc["preset"])
            doc = merged
        try:
            base = base_dir or Path(".")
            out = {}
            if "csv" in doc:
                out["csv_path"] = base / doc["csv"]
            if "json" in doc:
                out["json_path"] = base / doc["json"]
            return cls(
                family=doc["family"],
                statistic=doc["statistic"],
                x=doc["x"],
                paramset=doc.get("paramset"),
                census_cap=int(doc.get("census_cap", DEFAULT_CENSUS_CAP)),
                workers=int(doc.get("workers", 1)),
                seed=int(doc.get("seed", 0)),
                name=str(doc.get("name", "experiment")),
                base_dir=base,
                **out,
            )
        except KeyError as exc:
            raise ConfigError(f"config missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def echo(self) -> dict:
        """The experiment-defining part of the config (execution settings left out)."""
        doc = {"name": self.name, "family": self.family, "statistic": self.statistic, "x": self.x, "seed": self.seed}
        if self.paramset is not None:
            doc["paramset"] = self.paramset
        if self.statistic.get("stat") == "census":
            doc["census_cap"] = self.census_cap
        return doc


def _bad_preset(name):
    raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")


def preset_config(name: str, x: int | None = None, T: int | None = None, out: Path | None = None,
                  workers: int = 1) -> ExperimentConfig:
    if name not in PRESETS:
        _bad_preset(name)
    doc = json.loads(json.dumps(PRESETS[name]))
    doc["name"] = name
    if x is not None:
        doc["x"] = x
    if T is not None and "paramset" in doc:
        ps = doc["paramset"]
        if ps["kind"] == "sumset":
            ps["U"] = ps["V"] = list(range(1, T + 1))
        else:
            ps["T"] = T
    doc["workers"] = workers
    out = Path(out or ".")
    doc["csv"] = str(out / f"{name}.csv")
    doc["json"] = str(out / f"{name}.json")
    return ExperimentConfig.from_dict(doc)


# -- formatting ------------------------------------------------------------


def fmt(v: float) -> str:
    return format(float(v), ".12g")


def _round12(v):
    if isinstance(v, float):
        return float(fmt(v))
    if isinstance(v, dict):
        return {k: _round12(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_round12(x) for x in v]
    return v


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def render_csv(rows: list[tuple]) -> str:
    lines = [CSV_HEADER]
    for p, count, contrib, cum, pi_p, expected in rows:
        cells = [str(p), str(count), _cell(contrib), _cell(cum), str(pi_p), "" if expected is None else fmt(expected)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    return str(v) if isinstance(v, (int, np.integer)) else fmt(v)


# -- bound shapes ----------------------------------------------------------


def bound_shape(preset: str, pset: ParamSet | None, x: int, stat) -> tuple[str, float] | None:
    """Asymptotic upper-bound shape for a run (implied constants and o(1) factors dropped)."""
    if pset is None:
        return None
    T = pset.T
    zero = isinstance(stat, TraceStat) and stat.seq.kind == "zero"
    if pset.kind == "farey" and isinstance(stat, TraceStat):
        if preset == "lt-j":
            return "T x^(5/4) + T^2 x^(3/4)", T * x ** 1.25 + T**2 * x**0.75
        if zero:
            return "T x^(4/3) + T^2 x^(5/6)", T * x ** (4 / 3) + T**2 * x ** (5 / 6)
        return "T x^(11/8) + T^2 x^(7/8)", T * x ** (11 / 8) + T**2 * x ** (7 / 8)
    if pset.kind == "farey" and isinstance(stat, FieldStat):
        return "T x^(4/3) + T^2 x^(5/6)", T * x ** (4 / 3) + T**2 * x ** (5 / 6)
    if pset.kind == "farey_pairs" and isinstance(stat, TraceStat):
        return "T^5 + T^3 x^(5/4) + T^4 x^(3/4)", T**5 + T**3 * x**1.25 + T**4 * x**0.75
    if pset.kind == "farey_pairs" and isinstance(stat, FieldStat):
        return "T^4 x^(5/6) + T^2 x^(4/3)", T**4 * x ** (5 / 6) + T**2 * x ** (4 / 3)
    if pset.kind == "interval" and isinstance(stat, TraceStat):
        return "T^2 + T^(1/2) x^(5/4)", T**2 + T**0.5 * x**1.25
    if pset.kind == "interval" and isinstance(stat, FieldStat):
        return "T^(1/2) x^(4/3) + T x^(5/6)", T**0.5 * x ** (4 / 3) + T * x ** (5 / 6)
    if pset.kind == "sumset" and isinstance(stat, TraceStat):
        n = len(pset.U) * len(pset.V)
        return "T #U#V + (#U#V)^(3/4) x^(5/4)", T * n + n**0.75 * x**1.25
    return None


def _angle_bound(pset: ParamSet | None, x: int, deviation: float) -> dict:
    """Sato-Tate deviations against the error exponents: x^(-1/4) for Farey pairs, x^(-eps/4) for sum-sets."""
    if pset is not None and pset.kind == "sumset":
        eps = math.log(len(pset.U) * len(pset.V)) / math.log(x) - 1
        shape = x ** (-eps / 4)
        return {"shape": "x^(-eps/4)", "eps": eps, "in_regime": eps > 0, "value": abs(deviation) / shape}
    return {"shape": "x^(-1/4)", "value": abs(deviation) / x ** -0.25}


# -- runs ------------------------------------------------------------------


def _resolve_family(cfg: ExperimentConfig) -> tuple[CurveFamily, bool]:
    spec = cfg.family
    if not isinstance(spec, dict):
        raise ConfigError("family must be a JSON object")
    if "curve" in spec:
        A, B = spec["curve"]
        return CurveFamily.constant(int(A), int(B)), True
    try:
        return parse_family(spec), False
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _run_census(cfg: ExperimentConfig, family: CurveFamily) -> tuple[list[tuple], dict]:
    ell = int(cfg.statistic.get("ell", 17))
    primes = sieve_primes(cfg.census_cap).between(MIN_PRIME, cfg.census_cap)
    plist = sieve_primes(cfg.x)
    rows, cum, worst = [], 0.0, 0.0
    for p in primes:
        if p == ell:
            continue
        c = fiber_census(family, p)
        dev = max(abs(census_mod_ell(c, a, ell) - c.size / ell) for a in range(ell))
        cum += dev
        worst = max(worst, dev / (ell * math.sqrt(p)))
        rows.append((p, c.size, dev, cum, plist.count_upto(p), 3 * ell * math.sqrt(p)))
    summary = {
        "totals": {"primes": len(rows), "deviation_sum": cum},
        "avg_per_param": None,
        "ratio_to_pi": None,
        "bound_ratio": {"shape": "ell p^(1/2)", "value": worst},
    }
    return rows, summary


def execute(cfg: ExperimentConfig) -> tuple[list[tuple], dict]:
    """Run the experiment; returns CSV rows and the JSON summary (without timing)."""
    family, single = _resolve_family(cfg)
    if not single:
        family.require_nondegenerate()
    if cfg.statistic.get("stat") == "census":
        if single:
            raise ConfigError("census statistic needs a family, not a single curve")
        return _run_census(cfg, family)
    try:
        stat = parse_statistic(cfg.statistic)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad statistic spec: {exc}") from None
    pset = None
    if single:
        report: StatReport = single_curve((family, 1), stat, cfg.x, cfg.workers)
    else:
        if cfg.paramset is None:
            raise ConfigError("a family run needs a paramset")
        try:
            pset = parse_paramset(cfg.paramset, cfg.base_dir)
        except (OSError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad paramset spec: {exc}") from None
        report = family_average(family, pset, stat, cfg.x, cfg.workers)

    density = st_density(stat.window) if isinstance(stat, AngleStat) else None
    plist = sieve_primes(cfg.x)
    rows, cum = [], 0
    for p, count, contrib in report.rows.tolist():
        cum += contrib
        pi_p = plist.count_upto(p)
        rows.append((p, count, contrib, cum, pi_p, None if density is None else density * pi_p))

    summary: dict[str, Any] = {
        "totals": {
            "contribution": report.total,
            "param_count": report.n_params,
            "pi_x": report.pi_x,
            "good_param_prime_pairs": int(report.rows[:, 1].sum()),
        },
        "avg_per_param": report.avg_per_param,
        "ratio_to_pi": report.ratio_to_pi,
        "avg_over_pi": report.ratio_to_pi,
    }
    if density is not None:
        summary["totals"]["st_density"] = density
        summary["totals"]["st_deviation"] = report.ratio_to_pi - density
        summary["bound_ratio"] = _angle_bound(pset, cfg.x, report.ratio_to_pi - density)
    else:
        shape = bound_shape(cfg.name, pset, cfg.x, stat)
        summary["bound_ratio"] = None if shape is None else {"shape": shape[0], "value": report.total / shape[1]}
    return rows, summary


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run and write outputs; returns the process exit status."""
    start = time.perf_counter()
    try:
        rows, summary = execute(cfg)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except DegenerateFamilyError as exc:
        log.error("degenerate family: %s", exc)
        return EXIT_DEGENERATE
    except HypothesisError as exc:
        log.error("hypothesis violated: %s", exc)
        return EXIT_HYPOTHESIS
    doc = {"config": cfg.echo(), **summary, "elapsed_ms": round((time.perf_counter() - start) * 1000, 3)}
    doc = _round12(doc)
    csv_path = cfg.csv_path or cfg.base_dir / f"{cfg.name}.csv"
    json_path = cfg.json_path or cfg.base_dir / f"{cfg.name}.json"
    try:
        _atomic_write(csv_path, render_csv(rows))
        _atomic_write(json_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    except BaseException:
        for path in (csv_path, json_path):
            path.unlink(missing_ok=True)
        raise
    log.info("wrote %s and %s", csv_path, json_path)
    return EXIT_OK


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return ExperimentConfig.from_dict(doc, path.parent)
