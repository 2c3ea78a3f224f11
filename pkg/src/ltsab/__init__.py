"""Conservative multirate Adams-Bashforth time stepping with a DG Burgers testbed."""

from .coefficients import (
    AbCoeffs,
    BetaTable,
    CoefficientCache,
    ab_coefficients,
    accumulate_full_step,
    lts_small_step_beta,
    marginalize_volume,
    two_set_beta,
)
from .integrator import Evolution, StepLog, self_start, step_controller
from .time_grid import StepSequence, TickTime, UnionGrid, merge_union, to_ticks

__all__ = [
    "AbCoeffs",
    "BetaTable",
    "CoefficientCache",
    "Evolution",
    "StepLog",
    "StepSequence",
    "TickTime",
    "UnionGrid",
    "ab_coefficients",
    "accumulate_full_step",
    "lts_small_step_beta",
    "marginalize_volume",
    "merge_union",
    "self_start",
    "step_controller",
    "to_ticks",
    "two_set_beta",
]
