"""Exception types; the CLI maps each one to a distinct exit status."""


class ConfigError(ValueError):
    """Malformed experiment configuration (exit 2)."""


class DegenerateFamilyError(ValueError):
    """Delta(Z) vanishes identically or j(Z) is constant (exit 3)."""


class HypothesisError(ValueError):
    """Inputs fall outside the range where a counter is meaningful, e.g. ell < 17 or p <= T (exit 4)."""
