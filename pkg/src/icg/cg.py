"""Nonlinear conjugate gradient driver for interval multiobjective problems.

Each iteration computes the steepest-descent-like direction ``v(x^k)`` and
its value ``xi(x^k)``, stops once ``xi > -eps``, otherwise forms
``d^k = v(x^k) + beta_k d^{k-1}`` and takes a Wolfe step along it.
All the ``beta`` rules are ratios of ``psi_phi`` values:

=====  =====================================================================
FR     psi_k(v_k) / psi_{k-1}(v_{k-1})
CD     psi_k(v_k) / psi_{k-1}(d_{k-1})
DY     -psi_k(v_k) / (psi_k(d_{k-1}) - psi_{k-1}(d_{k-1}))
mDY    -psi_k(v_k) / (psi_k(d_{k-1}) - zeta psi_{k-1}(d_{k-1}))
=====  =====================================================================

where ``psi_j(.)`` is ``psi_phi`` linearized at ``x^j``.
"""

from __future__ import annotations

import enum
import json
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import linesearch as ls
from .ivm import MultiObjective
from .qp import QPSolver
from .subproblem import direction_from_data, linearize, psi_phi

log = logging.getLogger(__name__)

DENOM_TOL = 1e-14


class DegenerateDenominator(ArithmeticError):
    pass


class BetaKind(enum.Enum):
    SD = "sd"
    FR = "fr"
    CD = "cd"
    DY = "dy"
    MDY = "mdy"


@dataclass(frozen=True)
class BetaVariant:
    kind: BetaKind
    scale: float = 1.0
    zeta: float = 1.03

    def __post_init__(self):
        object.__setattr__(self, "kind", BetaKind(self.kind))
        if self.kind in (BetaKind.FR, BetaKind.CD, BetaKind.DY) and not 0.0 <= self.scale <= 1.0:
            raise ValueError("scale must lie in [0, 1]")
        if self.kind is BetaKind.MDY and not self.zeta > 1.0:
            raise ValueError("zeta must exceed 1")

    @property
    def name(self) -> str:
        return self.kind.value

    def describe(self) -> str:
        if self.kind is BetaKind.MDY:
            return f"mdy(zeta={self.zeta:g})"
        if self.kind is BetaKind.SD:
            return "sd"
        return f"{self.kind.value}(scale={self.scale:g})"


# scalings used in the reference experiments
REFERENCE_VARIANTS = {
    "sd": BetaVariant(BetaKind.SD),
    "fr": BetaVariant(BetaKind.FR, scale=0.98),
    "cd": BetaVariant(BetaKind.CD, scale=0.89),
    "dy": BetaVariant(BetaKind.DY, scale=0.81),
    "mdy": BetaVariant(BetaKind.MDY, zeta=1.03),
}


def variant(name: str) -> BetaVariant:
    try:
        return REFERENCE_VARIANTS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; choose from {sorted(REFERENCE_VARIANTS)}") from None


@dataclass(frozen=True)
class BetaState:
    psi_v: float            # psi_k(v_k)
    psi_v_prev: float       # psi_{k-1}(v_{k-1})
    psi_dprev: float        # psi_k(d_{k-1})
    psi_dprev_prev: float   # psi_{k-1}(d_{k-1})


def beta(var: BetaVariant, state: BetaState) -> float:
    kind = var.kind
    if kind is BetaKind.SD:
        return 0.0
    if kind is BetaKind.FR:
        num, den = state.psi_v, state.psi_v_prev
    elif kind is BetaKind.CD:
        num, den = state.psi_v, state.psi_dprev_prev
    elif kind is BetaKind.DY:
        num, den = -state.psi_v, state.psi_dprev - state.psi_dprev_prev
    else:
        num, den = -state.psi_v, state.psi_dprev - var.zeta * state.psi_dprev_prev
    if not np.isfinite(num) or not np.isfinite(den) or abs(den) <= DENOM_TOL:
        raise DegenerateDenominator(f"{kind.value}: denominator {den!r}")
    if kind in (BetaKind.DY, BetaKind.MDY) and den < 0:
        raise DegenerateDenominator(f"{kind.value}: negative denominator {den!r}")
    raw = num / den
    return raw if kind is BetaKind.MDY else var.scale * raw


def safeguard_clamp(beta_raw: float, mu: float, psi_v: float, psi_d_prev: float) -> float:
    """Project ``beta`` onto the range that keeps ``d^k`` a sufficient descent direction."""
    if not 0.0 <= mu < 1.0:
        raise ValueError("mu must lie in [0, 1)")
    if psi_d_prev <= 0.0:
        return max(beta_raw, 0.0)
    upper = -mu * psi_v / psi_d_prev
    return min(max(beta_raw, 0.0), upper)


def direction_update(v_k, beta_k: float, d_prev, k: int) -> np.ndarray:
    v_k = np.asarray(v_k, dtype=float)
    if k == 0:
        return v_k.copy()
    d_prev = np.asarray(d_prev, dtype=float)
    if d_prev.shape != v_k.shape:
        raise ValueError("direction dimensions disagree")
    return v_k + beta_k * d_prev


def descent_constant(var: BetaVariant, sigma: float) -> float | None:
    """Sufficient-descent constant guaranteed under strong Wolfe steps, if any."""
    if var.kind is BetaKind.CD and var.scale <= 1.0:
        return 1.0 - sigma
    if var.kind is BetaKind.DY and var.scale <= 1.0:
        return 1.0 / (1.0 + sigma)
    if var.kind is BetaKind.MDY:
        return var.zeta / (var.zeta + sigma)
    if var.kind is BetaKind.SD:
        return 1.0
    return None


class Status(enum.Enum):
    CRITICAL = "Critical"
    MAX_ITER = "MaxIter"
    LINE_SEARCH_FAIL = "LineSearchFail"


@dataclass(frozen=True)
class SolverConfig:
    rho: float = 1e-3
    sigma: float = 0.1
    eps: float = 1e-6
    max_iter: int = 10000
    variant: BetaVariant = REFERENCE_VARIANTS["sd"]
    wolfe_mode: ls.WolfeMode = ls.WolfeMode.STRONG
    safeguard_mu: float | None = None
    restart_on_nondescent: bool = True

    def __post_init__(self):
        if not 0.0 < self.rho < self.sigma < 1.0:
            raise ValueError(f"need 0 < rho < sigma < 1, got rho={self.rho}, sigma={self.sigma}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        if self.safeguard_mu is not None and not 0.0 <= self.safeguard_mu < 1.0:
            raise ValueError("safeguard mu must lie in [0, 1)")
        object.__setattr__(self, "wolfe_mode", ls.WolfeMode(self.wolfe_mode))

    def wolfe_params(self) -> ls.WolfeParams:
        return ls.WolfeParams(rho=self.rho, sigma=self.sigma, mode=self.wolfe_mode)

    def with_variant(self, var: BetaVariant) -> "SolverConfig":
        return replace(self, variant=var)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho, "sigma": self.sigma, "eps": self.eps, "max_iter": self.max_iter,
            "variant": self.variant.name, "scale": self.variant.scale, "zeta": self.variant.zeta,
            "wolfe_mode": self.wolfe_mode.value, "safeguard_mu": self.safeguard_mu,
            "restart_on_nondescent": self.restart_on_nondescent,
        }


@dataclass
class RunRecord:
    problem: str = ""
    variant: str = ""
    seed: int | None = None
    iterates: list = field(default_factory=list)
    values: list = field(default_factory=list)          # (m, 2) endpoint values per iterate
    xi_trace: list = field(default_factory=list)
    psi_v_trace: list = field(default_factory=list)
    psi_d_trace: list = field(default_factory=list)
    beta_trace: list = field(default_factory=list)
    step_trace: list = field(default_factory=list)
    zoutendijk_increments: list = field(default_factory=list)
    descent_ratios: list = field(default_factory=list)   # psi(d) / psi(v)
    linesearch_status: list = field(default_factory=list)
    inv_dnorm_sum: float = 0.0
    denominator_violations: int = 0
    status: Status | None = None
    wall_time: float = 0.0
    func_evals: int = 0
    grad_evals: int = 0
    restarts: int = 0
    error: str | None = None

    @property
    def iterations(self) -> int:
        return len(self.step_trace)

    @property
    def final_xi(self) -> float:
        return self.xi_trace[-1] if self.xi_trace else float("nan")

    @property
    def x_final(self) -> np.ndarray:
        return np.asarray(self.iterates[-1])

    def to_json(self) -> dict:
        return {
            "problem": self.problem, "variant": self.variant, "seed": self.seed,
            "status": self.status.value if self.status else None,
            "iterations": self.iterations, "wall_time_s": self.wall_time,
            "func_evals": self.func_evals, "grad_evals": self.grad_evals,
            "restarts": self.restarts, "final_xi": self.final_xi,
            "iterates": [list(map(float, x)) for x in self.iterates],
            "xi_trace": self.xi_trace, "psi_v_trace": self.psi_v_trace,
            "psi_d_trace": self.psi_d_trace, "beta_trace": self.beta_trace,
            "step_trace": self.step_trace,
            "zoutendijk_increments": self.zoutendijk_increments,
            "descent_ratios": self.descent_ratios,
            "linesearch_status": self.linesearch_status,
            "inv_dnorm_sum": self.inv_dnorm_sum,
            "error": self.error,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    def summary_row(self) -> dict:
        return {
            "problem": self.problem, "variant": self.variant, "seed": self.seed,
            "iters": self.iterations, "status": self.status.value if self.status else "",
            "wall_time": self.wall_time, "final_xi": self.final_xi,
        }

    def trace_lines(self) -> list[str]:
        """One JSON line per iterate: ``{k, xi, psi_at_v, norm_v}``."""
        out = []
        for k, (xi, psi) in enumerate(zip(self.xi_trace, self.psi_v_trace)):
            norm_v = float(np.sqrt(max(2.0 * (xi - psi), 0.0)))
            out.append(json.dumps({"k": k, "xi": xi, "psi_at_v": psi, "norm_v": norm_v}))
        return out


class _Counted:
    """Proxy counting objective and gradient evaluations."""

    def __init__(self, mo: MultiObjective):
        self.mo = mo
        self.func_evals = 0
        self.grad_evals = 0

    @property
    def m(self):
        return self.mo.m

    @property
    def dim(self):
        return self.mo.dim

    def endpoint_values(self, x):
        self.func_evals += 1
        return self.mo.endpoint_values(x)

    def gh_gradients(self, x):
        self.grad_evals += 1
        return self.mo.gh_gradients(x)


def run(mo: MultiObjective, x0, cfg: SolverConfig = SolverConfig(), seed: int | None = None,
        qp: QPSolver | None = None) -> RunRecord:
    """Run the conjugate gradient iteration from ``x0`` until ``xi(x^k) > -eps``."""
    qp = qp or QPSolver()
    var = cfg.variant
    params = cfg.wolfe_params()
    rec = RunRecord(problem=getattr(mo, "name", ""), variant=var.name, seed=seed)
    log.info("run %s/%s: wolfe=%s curvature %s", rec.problem, var.describe(),
             cfg.wolfe_mode.value,
             ls.STRONG_ORIENTATION if cfg.wolfe_mode is ls.WolfeMode.STRONG else "psi(t) >= sigma*psi0")

    counted = _Counted(mo)
    t_start = time.perf_counter()
    x = np.array(x0, dtype=float)
    base = counted.endpoint_values(x)
    data = linearize(counted, x)

    d_prev = None
    psi_v_prev = psi_d_prev = psi_dprev_here = None
    restart_next = False

    for k in range(cfg.max_iter + 1):
        res = direction_from_data(data, qp)
        rec.iterates.append(x.copy())
        rec.values.append(base.copy())
        rec.xi_trace.append(res.xi)
        rec.psi_v_trace.append(res.psi_at_v)

        if res.xi > -cfg.eps:
            rec.status = Status.CRITICAL
            break
        if k == cfg.max_iter:
            rec.status = Status.MAX_ITER
            break

        v, psi_v = res.v, res.psi_at_v
        b = 0.0
        if d_prev is not None and not restart_next:
            state = BetaState(psi_v, psi_v_prev, psi_dprev_here, psi_d_prev)
            try:
                b = beta(var, state)
            except DegenerateDenominator as exc:
                log.debug("k=%d restart: %s", k, exc)
                if var.kind in (BetaKind.DY, BetaKind.MDY) and psi_d_prev < 0 \
                        and cfg.wolfe_mode is ls.WolfeMode.STRONG:
                    rec.denominator_violations += 1
                rec.restarts += 1
                b = 0.0
            if cfg.safeguard_mu is not None:
                b = safeguard_clamp(b, cfg.safeguard_mu, psi_v, psi_dprev_here)
        elif restart_next:
            rec.restarts += 1

        d = direction_update(v, b, d_prev, 0 if b == 0.0 else k)
        psi_d = psi_phi(data, d)
        if not psi_d < 0.0:
            if not cfg.restart_on_nondescent:
                raise ls.NotDescentDirection(f"k={k}: conjugate direction has psi_phi(d)={psi_d!r}")
            log.debug("k=%d non-descent direction, restarting with v", k)
            rec.restarts += 1
            b, d, psi_d = 0.0, v.copy(), psi_v
            if not psi_d < 0.0:
                raise ls.NotDescentDirection(f"k={k}: v(x) is not a descent direction (xi={res.xi!r})")

        out = ls.search(counted, x, d, params, psi0=psi_d, base=base)
        if out.satisfied is ls.Satisfied.FAILED and b != 0.0:
            rec.restarts += 1
            b, d, psi_d = 0.0, v.copy(), psi_v
            out = ls.search(counted, x, d, params, psi0=psi_d, base=base)
        if out.satisfied is ls.Satisfied.FAILED:
            rec.status = Status.LINE_SEARCH_FAIL
            break

        dnorm2 = float(d @ d)
        rec.beta_trace.append(b)
        rec.psi_d_trace.append(psi_d)
        rec.step_trace.append(out.t)
        rec.zoutendijk_increments.append(psi_d * psi_d / dnorm2)
        rec.inv_dnorm_sum += 1.0 / dnorm2
        rec.descent_ratios.append(psi_d / psi_v)
        rec.linesearch_status.append(out.satisfied.value)

        x = out.x_new
        base = counted.endpoint_values(x)
        data = out.data_new if out.data_new is not None else linearize(counted, x)
        d_prev, psi_v_prev, psi_d_prev, psi_dprev_here = d, psi_v, psi_d, out.psi_at_t
        restart_next = out.satisfied is not ls.Satisfied.BOTH

    rec.wall_time = time.perf_counter() - t_start
    rec.func_evals = counted.func_evals
    rec.grad_evals = counted.grad_evals
    return rec
