"""Wolfe line search for interval-valued multiobjective problems.

Sufficient decrease asks every objective interval at ``x + t d`` to be
dominated by ``G_i(x) + rho t psi0`` (a degenerate shift), which is the same
as the scalar merit ``A(t) <= 0`` with::

    A(t) = max_i max(lo_i(x+td) - lo_i(x) - rho t psi0,
                     hi_i(x+td) - hi_i(x) - rho t psi0)

The curvature test uses ``psi(t) = psi_phi at x+td applied to d``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .ivm import MultiObjective
from .subproblem import LinearizationData, linearize, psi_phi

log = logging.getLogger(__name__)


class NotDescentDirection(ValueError):
    pass


class WolfeMode(enum.Enum):
    STANDARD = "standard"
    STRONG = "strong"


class Satisfied(enum.Enum):
    BOTH = "Both"
    DECREASE_ONLY = "DecreaseOnly"
    FAILED = "Failed"


# Strong curvature is enforced as |psi(t)| <= sigma |psi0|.
STRONG_ORIENTATION = "|psi(t)| <= sigma*|psi0|"


@dataclass(frozen=True)
class WolfeParams:
    rho: float = 1e-3
    sigma: float = 0.1
    mode: WolfeMode = WolfeMode.STRONG
    t_init: float = 1.0
    t_max: float = 1e6
    max_brackets: int = 60
    max_zoom: int = 60
    max_evals: int = 5000
    expand: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.rho < self.sigma < 1.0:
            raise ValueError(f"need 0 < rho < sigma < 1, got rho={self.rho}, sigma={self.sigma}")
        if self.t_init <= 0 or self.t_max < self.t_init:
            raise ValueError("need 0 < t_init <= t_max")
        if self.expand <= 1.0:
            raise ValueError("expansion factor must exceed 1")


@dataclass
class LineSearchOutcome:
    t: float
    evals: int
    satisfied: Satisfied
    psi_at_t: float
    x_new: np.ndarray | None = None
    data_new: LinearizationData | None = None
    trace: list | None = None


def merit(mo: MultiObjective, x, d, t, rho, psi0, base=None) -> float:
    """Largest violation of the interval sufficient-decrease inequalities at step ``t``."""
    x = np.asarray(x, dtype=float)
    if base is None:
        base = mo.endpoint_values(x)
    vals = mo.endpoint_values(x + t * np.asarray(d, dtype=float))
    return float(np.max(vals - base - rho * t * psi0))


def sufficient_decrease_holds(mo: MultiObjective, x, d, t, rho, psi0) -> bool:
    return merit(mo, x, d, t, rho, psi0) <= 0.0


def _curvature_ok(psi_t: float, psi0: float, sigma: float, mode: WolfeMode) -> bool:
    if mode is WolfeMode.STANDARD:
        return psi_t >= sigma * psi0
    return abs(psi_t) <= sigma * abs(psi0)


def curvature_holds(mo: MultiObjective, x, d, t, sigma, psi0, mode=WolfeMode.STRONG) -> bool:
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    psi_t = psi_phi(linearize(mo, x + t * d), d)
    return _curvature_ok(psi_t, psi0, sigma, WolfeMode(mode))


def search(mo: MultiObjective, x, d, params: WolfeParams = WolfeParams(),
           psi0: float | None = None, base=None, record_trace: bool = False) -> LineSearchOutcome:
    """Bracket-and-zoom search for a step meeting both Wolfe conditions.

    The bracketing phase doubles ``t`` while the step still decreases
    sufficiently and ``psi(t)`` stays below the curvature band. The zoom
    phase bisects, keeping a left end that decreases sufficiently with
    ``psi`` below the band and a right end that either fails decrease or has
    ``psi`` above the band; a continuity argument puts an acceptable step
    between them.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if psi0 is None:
        psi0 = psi_phi(linearize(mo, x), d)
    if not psi0 < 0.0:
        raise NotDescentDirection(f"psi_phi(d) = {psi0!r} is not negative")
    if base is None:
        base = mo.endpoint_values(x)

    rho, sigma, mode = params.rho, params.sigma, params.mode
    evals = 0
    trace = [] if record_trace else None
    cache: dict[float, tuple] = {}

    def at(t):
        nonlocal evals
        if t in cache:
            return cache[t]
        xt = x + t * d
        evals += 1
        a = float(np.max(mo.endpoint_values(xt) - base - rho * t * psi0))
        entry = (a, None, None, xt)
        if a <= 0.0:
            data = linearize(mo, xt)
            entry = (a, psi_phi(data, d), data, xt)
        cache[t] = entry
        if trace is not None:
            trace.append((t, a, entry[1]))
        log.debug("linesearch t=%.6g A=%.3e psi=%s", t, a, entry[1])
        return entry

    def done(t, how):
        a, psi_t, data, xt = at(t) if t > 0 else (0.0, psi0, None, x)
        return LineSearchOutcome(t, evals, how, psi_t, xt, data, trace)

    def too_low(psi_t):
        return psi_t < sigma * psi0

    lo = 0.0
    last_ok = 0.0
    hi = None
    t = params.t_init
    for _ in range(params.max_brackets):
        a, psi_t, _, _ = at(t)
        if a > 0.0:
            hi = t
            break
        last_ok = t
        if _curvature_ok(psi_t, psi0, sigma, mode):
            return done(t, Satisfied.BOTH)
        if not too_low(psi_t):
            # psi above the strong band
            hi = t
            break
        lo = t
        if t >= params.t_max or evals >= params.max_evals:
            break
        t = min(params.expand * t, params.t_max)

    if hi is not None:
        for _ in range(params.max_zoom):
            if evals >= params.max_evals:
                break
            t = 0.5 * (lo + hi)
            if not lo < t < hi:
                break
            a, psi_t, _, _ = at(t)
            if a > 0.0:
                hi = t
                continue
            last_ok = t
            if _curvature_ok(psi_t, psi0, sigma, mode):
                return done(t, Satisfied.BOTH)
            if too_low(psi_t):
                lo = t
            else:
                hi = t

    if last_ok > 0.0:
        return done(last_ok, Satisfied.DECREASE_ONLY)
    return LineSearchOutcome(t, evals, Satisfied.FAILED, float("nan"), None, None, trace)
