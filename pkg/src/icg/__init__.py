"""Nonlinear conjugate gradient methods for multiobjective interval optimization."""

from .interval import Interval
from .ivm import IntervalFunction, MultiObjective
from .subproblem import DirectionResult, solve_direction
from .cg import REFERENCE_VARIANTS, BetaVariant, RunRecord, SolverConfig, run
from .problems import lookup, registry, sample_start

__all__ = [
    "Interval", "IntervalFunction", "MultiObjective", "DirectionResult", "solve_direction",
    "REFERENCE_VARIANTS", "BetaVariant", "RunRecord", "SolverConfig", "run",
    "lookup", "registry", "sample_start",
]
__version__ = "0.1.0"
