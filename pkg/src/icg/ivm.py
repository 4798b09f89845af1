"""Interval-valued objectives and their gH-gradients.

An objective is given by its two endpoint functions and their gradients.
The gH-gradient at ``x`` is the vector of intervals whose ``j``-th entry is
``[min(dlo/dx_j, dhi/dx_j), max(dlo/dx_j, dhi/dx_j)]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .interval import Interval

ScalarFn = Callable[[np.ndarray], float]
GradFn = Callable[[np.ndarray], np.ndarray]


class EndpointOrderViolation(ValueError):
    """The lower endpoint function exceeded the upper one at some point."""


class DimensionMismatch(ValueError):
    pass


def _as_point(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != dim:
        raise DimensionMismatch(f"expected a vector of length {dim}, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class IntervalFunction:
    lower_fn: ScalarFn
    upper_fn: ScalarFn
    lower_grad: GradFn
    upper_grad: GradFn
    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dim must be a positive integer")

    @classmethod
    def from_center_width(cls, center_fn: ScalarFn, center_grad: GradFn,
                          width_fn: ScalarFn, width_grad: GradFn,
                          dim: int) -> "IntervalFunction":
        """Build ``[c(x) - w(x), c(x) + w(x)]``.

        ``w`` must be nonnegative wherever the objective is evaluated; a
        negative width raises :class:`EndpointOrderViolation`.
        """
        def half_width(x):
            w = float(width_fn(x))
            if w < 0:
                raise EndpointOrderViolation(f"negative width {w!r} at x={x!r}")
            return w

        return cls(
            lower_fn=lambda x: float(center_fn(x)) - half_width(x),
            upper_fn=lambda x: float(center_fn(x)) + half_width(x),
            lower_grad=lambda x: np.asarray(center_grad(x), float) - np.asarray(width_grad(x), float),
            upper_grad=lambda x: np.asarray(center_grad(x), float) + np.asarray(width_grad(x), float),
            dim=dim,
        )

    @classmethod
    def real(cls, fn: ScalarFn, grad: GradFn, dim: int) -> "IntervalFunction":
        """Degenerate objective ``[f, f]``."""
        return cls(fn, fn, grad, grad, dim)

    def endpoints(self, x) -> tuple[float, float]:
        x = _as_point(x, self.dim)
        lo, hi = float(self.lower_fn(x)), float(self.upper_fn(x))
        if lo > hi:
            raise EndpointOrderViolation(f"lower endpoint {lo!r} > upper endpoint {hi!r} at x={x!r}")
        return lo, hi

    def endpoint_grads(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = _as_point(x, self.dim)
        gl = np.asarray(self.lower_grad(x), dtype=float).reshape(-1)
        gu = np.asarray(self.upper_grad(x), dtype=float).reshape(-1)
        if gl.shape[0] != self.dim or gu.shape[0] != self.dim:
            raise DimensionMismatch("gradient length does not match dim")
        return gl, gu


@dataclass(frozen=True)
class GHGradient:
    """gH-gradient stored as two arrays of component endpoints."""
    lower: np.ndarray
    upper: np.ndarray

    @property
    def components(self) -> list[Interval]:
        return [Interval(lo, hi) for lo, hi in zip(self.lower, self.upper)]

    def __len__(self):
        return self.lower.shape[0]


def eval(f: IntervalFunction, x) -> Interval:  # noqa: A001 - mirrors the math name
    lo, hi = f.endpoints(x)
    return Interval(lo, hi)


def gh_gradient(f: IntervalFunction, x) -> GHGradient:
    gl, gu = f.endpoint_grads(x)
    return GHGradient(np.minimum(gl, gu), np.maximum(gl, gu))


def finite_diff_check(f: IntervalFunction, x, h: float = 1e-6) -> float:
    """Largest gap between analytic endpoint gradients and central differences."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = _as_point(x, f.dim)
    gl, gu = f.endpoint_grads(x)
    worst = 0.0
    for j in range(f.dim):
        e = np.zeros(f.dim)
        e[j] = h
        fd_lo = (f.lower_fn(x + e) - f.lower_fn(x - e)) / (2 * h)
        fd_hi = (f.upper_fn(x + e) - f.upper_fn(x - e)) / (2 * h)
        worst = max(worst, abs(gl[j] - fd_lo), abs(gu[j] - fd_hi))
    return float(worst)


@dataclass(frozen=True)
class MultiObjective:
    objectives: tuple[IntervalFunction, ...]
    name: str = "unnamed"

    def __init__(self, objectives: Sequence[IntervalFunction], name: str = "unnamed"):
        objectives = tuple(objectives)
        if not objectives:
            raise ValueError("need at least one objective")
        dims = {f.dim for f in objectives}
        if len(dims) != 1:
            raise DimensionMismatch(f"objective dimensions disagree: {sorted(dims)}")
        object.__setattr__(self, "objectives", objectives)
        object.__setattr__(self, "name", name)

    @property
    def m(self) -> int:
        return len(self.objectives)

    @property
    def dim(self) -> int:
        return self.objectives[0].dim

    def endpoint_values(self, x) -> np.ndarray:
        """``(m, 2)`` array of ``[lower, upper]`` values at ``x``."""
        return np.array([f.endpoints(x) for f in self.objectives])

    def values(self, x) -> list[Interval]:
        return [eval(f, x) for f in self.objectives]

    def gh_gradients(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Stacked gH-gradient endpoints, each of shape ``(m, n)``."""
        lows, highs = [], []
        for f in self.objectives:
            g = gh_gradient(f, x)
            lows.append(g.lower)
            highs.append(g.upper)
        return np.vstack(lows), np.vstack(highs)
