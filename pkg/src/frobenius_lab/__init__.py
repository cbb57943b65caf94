"""Frobenius trace statistics over one-parameter families of elliptic curves."""

from .arith import PrimeList, is_prime, legendre, mobius, sieve_primes, squarefree_part
from .curves import (
    BadReduction,
    CurveFamily,
    CurveModP,
    IntPoly,
    RationalParam,
    frobenius_angle,
    frobenius_field_disc,
    j_family,
    specialize_mod_p,
    trace,
    trace_naive,
)
from .errors import ConfigError, DegenerateFamilyError, HypothesisError
from .harmonic import (
    angle_counter_B,
    angle_counter_C,
    angle_counter_D,
    chebyshev_U,
    discrepancy,
    interval_count_A,
    michel_sum,
    semicircle_G,
)
from .paramsets import (
    ParamSet,
    additive_energy_V,
    coincidence_count_Q,
    farey_count,
    farey_enumerate,
    farey_expsum,
    residue_histogram,
    sumset_enumerate,
)
from .runner import ExperimentConfig, run_experiment
from .stats import (
    AngleWindow,
    TraceSequence,
    census_field,
    census_mod_ell,
    family_average,
    fiber_census,
    pi_angle,
    pi_field,
    pi_trace,
    st_density,
    trace_class_count,
)
from .suites import run_suite

__version__ = "0.1.0"
