"""Registry of interval-valued multiobjective test problems.

Interval objectives are built from a real center ``c`` and a nonnegative
half-width ``w`` as ``[c - w, c + w]``. The ``-analogue`` problems widen
classical deterministic biobjective test functions this way; they are
stand-ins, not reproductions of any published interval suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ivm import IntervalFunction, MultiObjective


class UnknownProblem(KeyError):
    pass


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    mo: MultiObjective
    lower: np.ndarray
    upper: np.ndarray
    known_critical: tuple = ()
    convex: bool = False
    degenerate: bool = False
    bounded_below: bool = True

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != (self.mo.dim,) or hi.shape != (self.mo.dim,):
            raise ValueError("box bounds must match the problem dimension")
        if np.any(lo >= hi):
            raise ValueError("box needs lower < upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def n(self) -> int:
        return self.mo.dim

    @property
    def m(self) -> int:
        return self.mo.m

    def width(self, i: int, x) -> float:
        lo, hi = self.mo.objectives[i].endpoints(x)
        return 0.5 * (hi - lo)


def _sqnorm(shift):
    shift = np.asarray(shift, dtype=float)
    return (lambda x: float((x - shift) @ (x - shift)),
            lambda x: 2.0 * (x - shift))


def _scaled(fg, k):
    f, g = fg
    return (lambda x: k * f(x), lambda x: k * g(x))


def _iq_convex_2() -> ProblemSpec:
    w = (lambda x: 0.1 * (1.0 + x @ x), lambda x: 0.2 * x)
    objs = [IntervalFunction.from_center_width(*_sqnorm(c), *w, dim=2)
            for c in ((1.0, 0.0), (-1.0, 0.0))]
    return ProblemSpec("iq-convex-2", MultiObjective(objs, "iq-convex-2"),
                       [-5.0, -5.0], [5.0, 5.0], convex=True)


def _iq_shared_min() -> ProblemSpec:
    w = (lambda x: 0.05 * (1.0 + x @ x), lambda x: 0.1 * x)
    q1 = _sqnorm((0.0, 0.0))
    q2 = _scaled(q1, 2.0)
    objs = [IntervalFunction.from_center_width(*q, *w, dim=2) for q in (q1, q2)]
    return ProblemSpec("iq-shared-min", MultiObjective(objs, "iq-shared-min"),
                       [-5.0, -5.0], [5.0, 5.0], known_critical=(np.zeros(2),), convex=True)


def _bk1_analogue() -> ProblemSpec:
    f1, g1 = _sqnorm((0.0, 0.0))
    f2, g2 = _sqnorm((5.0, 5.0))
    w = (lambda x: 0.01 * (1.0 + f1(x) + f2(x)), lambda x: 0.01 * (g1(x) + g2(x)))
    objs = [IntervalFunction.from_center_width(f1, g1, *w, dim=2),
            IntervalFunction.from_center_width(f2, g2, *w, dim=2)]
    return ProblemSpec("bk1-analogue", MultiObjective(objs, "bk1-analogue"),
                       [-5.0, -5.0], [10.0, 10.0], convex=True)


def _fon_analogue(n: int = 3) -> ProblemSpec:
    a = 1.0 / np.sqrt(n)

    def make(sign):
        def f(x):
            return 1.0 - np.exp(-float(np.sum((x - sign * a) ** 2)))

        def g(x):
            r = x - sign * a
            return 2.0 * r * np.exp(-float(r @ r))
        return f, g

    w = (lambda x: 0.05, lambda x: np.zeros(n))
    objs = [IntervalFunction.from_center_width(*make(s), *w, dim=n) for s in (1.0, -1.0)]
    return ProblemSpec("fon-analogue", MultiObjective(objs, "fon-analogue"),
                       np.full(n, -4.0), np.full(n, 4.0))


def _deg_real_sd(n: int = 10) -> ProblemSpec:
    D = np.arange(1.0, n + 1.0)
    f = IntervalFunction.real(lambda x: 0.5 * float(x @ (D * x)), lambda x: D * x, dim=n)
    return ProblemSpec("deg-real-sd", MultiObjective([f], "deg-real-sd"),
                       np.full(n, -5.0), np.full(n, 5.0), known_critical=(np.zeros(n),),
                       convex=True, degenerate=True)


def _nonconvex_hill() -> ProblemSpec:
    # trigonometric ripples on a weak quadratic bowl keep both objectives bounded below
    def c1(x):
        return float(np.sin(x[0]) * np.cos(x[1]) + 0.05 * (x @ x))

    def g1(x):
        return np.array([np.cos(x[0]) * np.cos(x[1]), -np.sin(x[0]) * np.sin(x[1])]) + 0.1 * x

    s = np.array([1.0, 1.0])

    def c2(x):
        return float(np.cos(x[0] + x[1]) + 0.05 * ((x - s) @ (x - s)))

    def g2(x):
        return -np.sin(x[0] + x[1]) * np.ones(2) + 0.1 * (x - s)

    w = (lambda x: 0.1, lambda x: np.zeros(2))
    objs = [IntervalFunction.from_center_width(c1, g1, *w, dim=2),
            IntervalFunction.from_center_width(c2, g2, *w, dim=2)]
    return ProblemSpec("nonconvex-hill", MultiObjective(objs, "nonconvex-hill"),
                       [-4.0, -4.0], [4.0, 4.0])


_BUILDERS = {
    "iq-convex-2": _iq_convex_2,
    "iq-shared-min": _iq_shared_min,
    "bk1-analogue": _bk1_analogue,
    "fon-analogue": _fon_analogue,
    "deg-real-sd": _deg_real_sd,
    "nonconvex-hill": _nonconvex_hill,
}


@lru_cache(maxsize=None)
def _registry() -> tuple[ProblemSpec, ...]:
    return tuple(build() for build in _BUILDERS.values())


def registry() -> list[ProblemSpec]:
    return list(_registry())


def names() -> list[str]:
    return list(_BUILDERS)


def lookup(name: str) -> ProblemSpec:
    for spec in _registry():
        if spec.name == name:
            return spec
    raise UnknownProblem(name)


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; identical draws on every platform for a given seed."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def sample_start(spec: ProblemSpec, seed: int) -> np.ndarray:
    u = rng_for(seed).random(spec.n)
    return spec.lower + u * (spec.upper - spec.lower)


def describe(spec: ProblemSpec) -> str:
    box = "x".join(f"[{lo:g},{hi:g}]" for lo, hi in zip(spec.lower, spec.upper))
    return f"{spec.name}\tn={spec.n}\tm={spec.m}\tconvex={str(spec.convex).lower()}\tbox={box}"
