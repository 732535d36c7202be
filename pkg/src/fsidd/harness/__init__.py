"""Experiments, configuration, verification and the command-line tool."""

from .cases import (
    ErrorReport,
    build_hemo_problem,
    build_mms_problem,
    inlet_stress,
    lame_from_young,
    mms_errors,
    rates,
    run_convergence_study,
    run_hemodynamics,
    run_mms,
)
from .config import RunConfig, load_config, parse_config_text
from .mms import MmsExact, mms_exact
from .verify import run_verification

__all__ = [
    "ErrorReport", "MmsExact", "RunConfig", "build_hemo_problem", "build_mms_problem",
    "inlet_stress", "lame_from_young", "load_config", "mms_errors", "mms_exact",
    "parse_config_text", "rates", "run_convergence_study", "run_hemodynamics", "run_mms",
    "run_verification",
]
