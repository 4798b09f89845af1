"""Dense convex QP solver.

Solves::

    minimize    0.5 z'Qz + c'z
    subject to  Az <= b

with ``Q`` symmetric positive semidefinite, using an alternating-direction
(ADMM) iteration in the style of OSQP followed by a polish step that solves
the KKT system restricted to the detected active set. Everything is dense;
the target instances have a few hundred variables at most.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import nnls


class QPError(RuntimeError):
    pass


class NumericalBreakdown(QPError):
    pass


class QPInfeasible(QPError):
    pass


class QPNotConverged(QPError):
    pass


class Status(enum.Enum):
    SOLVED = "Solved"
    MAX_ITER = "MaxIter"
    INFEASIBLE = "Infeasible"


@dataclass
class QPInstance:
    Q: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        d = self.c.shape[0]
        self.A = np.asarray(self.A, dtype=float).reshape(-1, d)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        if self.Q.shape != (d, d):
            raise ValueError(f"Q has shape {self.Q.shape}, expected {(d, d)}")
        if self.A.shape[0] != self.b.shape[0]:
            raise ValueError("A and b have inconsistent row counts")
        if not np.allclose(self.Q, self.Q.T, rtol=0.0, atol=1e-12):
            raise ValueError("Q must be symmetric")

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_cons(self) -> int:
        return self.b.shape[0]

    def objective(self, z: np.ndarray) -> float:
        return float(0.5 * z @ self.Q @ z + self.c @ z)


@dataclass
class QPSolution:
    z: np.ndarray
    objective: float
    duals: np.ndarray
    status: Status
    iterations: int = 0
    polished: bool = False
    info: dict = field(default_factory=dict)


def kkt_residuals(inst: QPInstance, z: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Primal infeasibility, stationarity and complementarity residuals (inf-norms)."""
    Az = inst.A @ z
    prim = float(np.max(Az - inst.b, initial=0.0))
    stat = float(np.max(np.abs(inst.Q @ z + inst.c + inst.A.T @ y), initial=0.0))
    comp = float(abs(y @ (Az - inst.b)))
    return prim, stat, comp


class QPSolver:
    """ADMM with over-relaxation, adaptive penalty and active-set polishing.

    Parameters
    ----------
    rho : float
        Initial ADMM penalty.
    alpha : float
        Over-relaxation factor.
    sigma : float
        Diagonal regularization added to ``Q`` in the linear systems.
    adapt_every : int
        Iterations between penalty updates; a polish is attempted at the
        same checkpoints.
    """

    def __init__(self, rho: float = 0.1, alpha: float = 1.6, sigma: float = 1e-10,
                 adapt_every: int = 25):
        self.rho = rho
        self.alpha = alpha
        self.sigma = sigma
        self.adapt_every = adapt_every

    def solve(self, inst: QPInstance, tol: float = 1e-9, max_iter: int = 20000) -> QPSolution:
        if tol <= 0:
            raise ValueError("tol must be positive")
        for arr in (inst.Q, inst.c, inst.A, inst.b):
            if not np.all(np.isfinite(arr)):
                raise NumericalBreakdown("non-finite QP data")

        d, p = inst.n_vars, inst.n_cons
        Q, c, A, b = inst.Q, inst.c, inst.A, inst.b

        if p == 0:
            z = self._unconstrained(Q, c)
            return QPSolution(z, inst.objective(z), np.zeros(0), Status.SOLVED, 0, True)

        rho = self.rho
        x = np.zeros(d)
        zc = np.minimum(A @ x, b)
        y = np.zeros(p)
        factor = self._factor(Q, A, rho)
        best = None
        k = 0

        for k in range(1, max_iter + 1):
            rhs = self.sigma * x - c + A.T @ (rho * zc - y)
            x_t = sla.cho_solve(factor, rhs)
            z_t = A @ x_t
            x = self.alpha * x_t + (1.0 - self.alpha) * x
            z_relax = self.alpha * z_t + (1.0 - self.alpha) * zc
            z_new = np.minimum(z_relax + y / rho, b)
            y_prev = y
            y = y + rho * (z_relax - z_new)
            zc = z_new

            if k % self.adapt_every and k != max_iter:
                continue

            Ax = A @ x
            r_prim = float(np.max(np.abs(Ax - zc)))
            Qx = Q @ x
            Aty = A.T @ y
            r_dual = float(np.max(np.abs(Qx + c + Aty)))

            polished = self._polish(inst, x, y, zc, tol)
            if polished is not None:
                polished.iterations = k
                return polished

            scale_p = max(np.max(np.abs(Ax)), np.max(np.abs(zc)), 1.0)
            scale_d = max(np.max(np.abs(Qx)), np.max(np.abs(Aty)), np.max(np.abs(c)), 1.0)
            if r_prim <= tol * scale_p and r_dual <= tol * scale_d:
                yc = np.maximum(y, 0.0)
                return QPSolution(x.copy(), inst.objective(x), yc, Status.SOLVED, k)

            if self._certify_infeasible(A, b, y - y_prev, tol):
                return QPSolution(x.copy(), inst.objective(x), np.maximum(y, 0.0),
                                  Status.INFEASIBLE, k)

            if best is None or r_prim + r_dual < best[0]:
                best = (r_prim + r_dual, x.copy(), np.maximum(y, 0.0))

            ratio = (r_prim / scale_p) / max(r_dual / scale_d, 1e-300)
            new_rho = float(np.clip(rho * np.sqrt(ratio), 1e-6, 1e6))
            if new_rho > 5.0 * rho or new_rho < rho / 5.0:
                rho = new_rho
                factor = self._factor(Q, A, rho)

        _, xb, yb = best
        return QPSolution(xb, inst.objective(xb), yb, Status.MAX_ITER, k)

    def _factor(self, Q, A, rho):
        M = Q + self.sigma * np.eye(Q.shape[0]) + rho * (A.T @ A)
        try:
            return sla.cho_factor(M)
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown("ADMM system is not positive definite") from exc

    def _unconstrained(self, Q, c):
        z, *_ = np.linalg.lstsq(Q, -c, rcond=None)
        if np.max(np.abs(Q @ z + c), initial=0.0) > 1e-8 * (1 + np.max(np.abs(c), initial=0.0)):
            raise QPError("unconstrained QP is unbounded below")
        return z

    def _polish(self, inst: QPInstance, x, y, zc, tol) -> QPSolution | None:
        """Solve the KKT system on the guessed active set; return it only if it checks out."""
        A, b, Q, c = inst.A, inst.b, inst.Q, inst.c
        slack = b - zc
        active = np.flatnonzero(y > slack)
        d, na = x.shape[0], active.shape[0]
        Aa = A[active]
        K = np.zeros((d + na, d + na))
        K[:d, :d] = Q
        K[:d, d:] = Aa.T
        K[d:, :d] = Aa
        # correction form: directions not pinned by the KKT system keep the ADMM values
        r = np.concatenate([-(Q @ x + c), b[active] - Aa @ x])
        sol, *_ = np.linalg.lstsq(K, r, rcond=None)
        z = x + sol[:d]
        ya = sol[d:]
        for _ in range(2):
            r = np.concatenate([-(Q @ z + c + Aa.T @ ya), b[active] - Aa @ z])
            step, *_ = np.linalg.lstsq(K, r, rcond=None)
            z = z + step[:d]
            ya = ya + step[d:]
        if na and np.min(ya) < -tol:
            # degenerate vertex: the multipliers are not unique, pick a nonnegative set
            ya, _ = nnls(Aa.T, -(Q @ z + c))
        duals = np.zeros(b.shape[0])
        duals[active] = np.maximum(ya, 0.0)
        prim, stat, comp = kkt_residuals(inst, z, duals)
        obj = inst.objective(z)
        scale = 1.0 + max(np.max(np.abs(c), initial=0.0), np.max(np.abs(b), initial=0.0))
        if prim > tol * scale or stat > tol * scale or comp > tol * (1.0 + abs(obj)):
            return None
        return QPSolution(z, obj, duals, Status.SOLVED, polished=True)

    @staticmethod
    def _certify_infeasible(A, b, dy, tol) -> bool:
        norm_dy = float(np.max(np.abs(dy)))
        if norm_dy <= 1e-12:
            return False
        eps = max(tol, 1e-7)
        if np.min(dy) < -eps * norm_dy:
            return False
        return (float(np.max(np.abs(A.T @ dy))) <= eps * norm_dy
                and float(b @ np.maximum(dy, 0.0)) < -eps * norm_dy)


def solve(inst: QPInstance, tol: float = 1e-9, max_iter: int = 20000) -> QPSolution:
    """Solve ``inst`` with a fresh :class:`QPSolver` using default settings."""
    return QPSolver().solve(inst, tol=tol, max_iter=max_iter)


def dump_instance(inst: QPInstance, path) -> None:
    """Write ``(Q, c, A, b)`` as a plain-text file for offline cross-checks."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for name, arr in (("Q", inst.Q), ("c", inst.c[None, :]), ("A", inst.A), ("b", inst.b[None, :])):
            rows, cols = arr.shape
            fh.write(f"# {name} {rows} {cols}\n")
            np.savetxt(fh, arr, fmt="%.17g")


def load_instance(path) -> QPInstance:
    blocks = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    i = 0
    while i < len(lines):
        _, name, rows, cols = lines[i].split()
        rows, cols = int(rows), int(cols)
        data = [list(map(float, ln.split())) for ln in lines[i + 1:i + 1 + rows]]
        blocks[name] = np.array(data, dtype=float).reshape(rows, cols)
        i += 1 + rows
    return QPInstance(blocks["Q"], blocks["c"][0], blocks["A"], blocks["b"][0])
