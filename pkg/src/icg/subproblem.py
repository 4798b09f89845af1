"""Direction-finding subproblem.

At a point ``x`` the linearized interval objectives give, for every objective
``i``, the upper-endpoint model ``g_upper(i, v) = 0.5 s_i'v + 0.5 w_i'|v|`` with
``s_i`` the sum and ``w_i`` the difference of the gH-gradient endpoints. The
steepest-descent-like direction is the unique minimizer ``v(x)`` of
``max_i g_upper(i, v) + 0.5 ||v||^2`` and ``xi(x)`` its optimal value. The
nonsmooth problem is solved as a QP in ``(v, u, tau)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .ivm import MultiObjective
from .qp import QPInstance, QPSolver, Status, QPInfeasible, QPNotConverged

QP_TOL = 1e-9


@dataclass(frozen=True)
class LinearizationData:
    sum_vec: np.ndarray   # (m, n)
    diff_vec: np.ndarray  # (m, n), nonnegative

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.sum_vec, dtype=float))
        w = np.atleast_2d(np.asarray(self.diff_vec, dtype=float))
        if s.shape != w.shape:
            raise ValueError("sum_vec and diff_vec must have the same shape")
        if np.any(w < 0):
            raise ValueError("gH-gradient widths must be nonnegative")
        object.__setattr__(self, "sum_vec", s)
        object.__setattr__(self, "diff_vec", w)

    @classmethod
    def from_endpoints(cls, lower: np.ndarray, upper: np.ndarray) -> "LinearizationData":
        lower = np.atleast_2d(lower)
        upper = np.atleast_2d(upper)
        return cls(lower + upper, upper - lower)

    @property
    def m(self) -> int:
        return self.sum_vec.shape[0]

    @property
    def n(self) -> int:
        return self.sum_vec.shape[1]


def linearize(mo: MultiObjective, x) -> LinearizationData:
    lower, upper = mo.gh_gradients(x)
    return LinearizationData.from_endpoints(lower, upper)


def g_upper(data: LinearizationData, i: int, v) -> float:
    v = np.asarray(v, dtype=float)
    return float(0.5 * data.sum_vec[i] @ v + 0.5 * data.diff_vec[i] @ np.abs(v))


def g_lower(data: LinearizationData, i: int, v) -> float:
    v = np.asarray(v, dtype=float)
    return float(0.5 * data.sum_vec[i] @ v - 0.5 * data.diff_vec[i] @ np.abs(v))


def upper_models(data: LinearizationData, v) -> np.ndarray:
    """All ``g_upper(i, v)`` at once."""
    v = np.asarray(v, dtype=float)
    return 0.5 * (data.sum_vec @ v + data.diff_vec @ np.abs(v))


def psi_phi(data: LinearizationData, v) -> float:
    return float(np.max(upper_models(data, v)))


@dataclass(frozen=True)
class DirectionResult:
    v: np.ndarray
    xi: float
    psi_at_v: float
    multipliers: np.ndarray
    degenerate: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def norm_v(self) -> float:
        return float(np.linalg.norm(self.v))

    def to_json(self, k: int) -> dict:
        return {"k": k, "xi": self.xi, "psi_at_v": self.psi_at_v, "norm_v": self.norm_v}


def build_qp(data: LinearizationData) -> QPInstance:
    """Assemble the QP over ``z = (v, u, tau)``.

    Rows: ``s_i'v + w_i'u - 2 tau <= 0`` for each objective, then
    ``v_j - u_j <= 0`` and ``-v_j - u_j <= 0`` for each coordinate.
    """
    m, n = data.m, data.n
    d = 2 * n + 1
    Q = np.zeros((d, d))
    Q[:n, :n] = np.eye(n)
    c = np.zeros(d)
    c[-1] = 1.0
    eye = np.eye(n)
    A = np.zeros((m + 2 * n, d))
    A[:m, :n] = data.sum_vec
    A[:m, n:2 * n] = data.diff_vec
    A[:m, -1] = -2.0
    A[m:m + n, :n] = eye
    A[m:m + n, n:2 * n] = -eye
    A[m + n:, :n] = -eye
    A[m + n:, n:2 * n] = -eye
    return QPInstance(Q, c, A, np.zeros(m + 2 * n))


def direction_from_data(data: LinearizationData, qp: QPSolver | None = None,
                        tol: float = QP_TOL) -> DirectionResult:
    qp = qp or QPSolver()
    # v is positively homogeneous in the gradient data: solve at unit scale
    kappa = float(max(np.max(np.abs(data.sum_vec)), np.max(data.diff_vec)))
    unit = data if kappa == 0.0 else LinearizationData(data.sum_vec / kappa, data.diff_vec / kappa)
    sol = qp.solve(build_qp(unit), tol=tol)
    if sol.status is Status.INFEASIBLE:
        raise QPInfeasible("direction QP reported infeasible; the zero vector is always feasible")
    if sol.status is not Status.SOLVED:
        raise QPNotConverged(f"direction QP stopped with status {sol.status.value}")
    n, m = data.n, data.m
    v = sol.z[:n] * (kappa if kappa > 0.0 else 1.0)
    # only v is unique; u and tau are reset to their optimal values given v
    psi = psi_phi(data, v)
    xi = psi + 0.5 * float(v @ v)
    if xi > 0.0:
        # rounding noise around a critical point; v = 0 is feasible with value 0
        v, psi, xi = np.zeros(n), 0.0, 0.0
    lam = sol.duals[:m]
    total = float(lam.sum())
    if total > 1e-12:
        mult, degenerate = lam / total, False
    else:
        mult, degenerate = np.full(m, 1.0 / m), True
    extra = {"qp_iterations": sol.iterations, "qp_objective": sol.objective,
             "u": np.abs(v), "tau": psi}
    return DirectionResult(v, xi, psi, mult, degenerate, extra)


def solve_direction(mo: MultiObjective, x, qp: QPSolver | None = None) -> DirectionResult:
    return direction_from_data(linearize(mo, x), qp)


def is_pareto_critical(res: DirectionResult, eps: float) -> bool:
    if eps <= 0:
        raise ValueError("eps must be positive")
    return res.xi > -eps


# ---------------------------------------------------------------------------
# Independent oracle: maximize the Lagrangian dual over the simplex.


def _soft_threshold(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    return -np.sign(a) * np.maximum(np.abs(a) - c, 0.0)


def _dual_values(data: LinearizationData, lam: np.ndarray) -> np.ndarray:
    a = 0.5 * lam @ data.sum_vec
    c = 0.5 * lam @ data.diff_vec
    r = np.maximum(np.abs(a) - c, 0.0)
    return -0.5 * np.sum(r * r, axis=-1)


def simplex_grid(m: int, density: int) -> np.ndarray:
    """All weight vectors with entries ``k / density`` summing to one."""
    if m == 1:
        return np.ones((1, 1))
    rows = []
    for bars in itertools.combinations(range(density + m - 1), m - 1):
        parts = np.diff((-1,) + bars + (density + m - 1,)) - 1
        rows.append(parts)
    return np.array(rows, dtype=float) / density


def oracle_direction(data: LinearizationData, grid_density: int = 200,
                     tie_tol: float = 1e-9) -> DirectionResult:
    """Direction from the dual: grid search over simplex weights, then local refinement.

    For weights ``lam`` the inner minimization over ``v`` separates by
    coordinate and is solved by soft-thresholding. ``degenerate`` is set when
    several grid points tie with the best dual value within ``tie_tol``.
    """
    if grid_density < 100:
        raise ValueError("grid_density must be at least 100")
    m = data.m
    grid = simplex_grid(m, grid_density)
    vals = _dual_values(data, grid)
    best = int(np.argmax(vals))
    lam, val = grid[best].copy(), float(vals[best])
    ties = int(np.sum(vals >= val - tie_tol))

    # pattern search along e_i - e_k, halving the step
    dirs = [np.eye(m)[i] - np.eye(m)[k] for i in range(m) for k in range(m) if i != k]
    h = 1.0 / grid_density
    while h > 1e-15 and dirs:
        improved = False
        for dvec in dirs:
            cand = lam + h * dvec
            if np.min(cand) < 0.0:
                step = min(h, lam[dvec < 0].min())
                if step <= 0.0:
                    continue
                cand = lam + step * dvec
            cval = float(_dual_values(data, cand))
            if cval > val:
                lam, val, improved = cand, cval, True
        if not improved:
            h *= 0.5

    a = 0.5 * lam @ data.sum_vec
    c = 0.5 * lam @ data.diff_vec
    v = _soft_threshold(a, c)
    return DirectionResult(v, val, psi_phi(data, v), lam, degenerate=ties > 1,
                           extra={"ties": ties})


def closed_form_single(data: LinearizationData) -> np.ndarray:
    """``v(x)`` for one objective: soft-threshold of half the endpoint sum."""
    if data.m != 1:
        raise ValueError("closed form only for a single objective")
    return _soft_threshold(0.5 * data.sum_vec[0], 0.5 * data.diff_vec[0])


__all__ = [
    "LinearizationData", "DirectionResult", "linearize", "g_upper", "g_lower",
    "upper_models", "psi_phi", "build_qp", "direction_from_data", "solve_direction",
    "is_pareto_critical", "oracle_direction", "simplex_grid", "closed_form_single",
    "QPInfeasible", "QPNotConverged",
]
