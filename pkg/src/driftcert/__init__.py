"""Drift-based recurrence and transience certificates for Markov chains on the nonnegative integers."""

__version__ = "0.1.0"

from .birth_death import BirthDeathSpec, TailHint, classify_birth_death, rho_products, stationary_mass  # noqa: E402
from .chain_model import (  # noqa: E402
    BUILTINS,
    ChainSpec,
    RowDistribution,
    build_builtin,
    check_irreducible_truncated,
    detect_band_bounds,
    dump_spec,
    load_spec,
    read_spec_file,
    validate_row,
)
from .criteria import LyapunovCheck, LyapunovFunction, classify, run_checkers  # noqa: E402
from .drift_analysis import (  # noqa: E402
    DriftProfile,
    drift_profile,
    kaplan_function,
    local_oscillation,
    mean_drift,
    second_moment_drift,
)
from .report import ClassificationReport  # noqa: E402
from .simulator import ReturnStats, empirical_drift, estimate_return_stats, simulate_trajectory  # noqa: E402
from .tails import ConstantTail, PowerLawTail  # noqa: E402
from .verdicts import Caveat, Conclusion, Verdict, VerdictClass  # noqa: E402

__all__ = [
    "BirthDeathSpec", "ReturnStats", "TailHint", "classify_birth_death", "empirical_drift",
    "estimate_return_stats", "rho_products", "run_checkers", "simulate_trajectory", "stationary_mass",
    "BUILTINS", "Caveat", "ChainSpec", "ClassificationReport", "Conclusion", "ConstantTail",
    "DriftProfile", "LyapunovCheck", "LyapunovFunction", "PowerLawTail", "RowDistribution",
    "Verdict", "VerdictClass", "build_builtin", "check_irreducible_truncated", "classify",
    "detect_band_bounds", "drift_profile", "dump_spec", "kaplan_function", "load_spec",
    "local_oscillation", "mean_drift", "read_spec_file", "second_moment_drift", "validate_row",
]
