"""Closed real intervals ``[lo, hi]`` with the small algebra the solver needs.

Only the operations used by the optimization code are provided: Minkowski
sum, scaling by a real, the generalized Hukuhara (gH) difference, the two
dominance relations and the max-abs norm. Endpoints are plain IEEE doubles;
there is no outward rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass


class IntervalOrderError(ValueError):
    """Raised when an interval is built with ``lo > hi``."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if math.isinf(lo) or math.isinf(hi):
            raise ValueError("interval endpoints must be finite")
        if lo > hi:
            raise IntervalOrderError(f"lower endpoint {lo!r} exceeds upper endpoint {hi!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, a: float) -> "Interval":
        return cls(a, a)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return add(self, other)

    def __rmul__(self, alpha: float) -> "Interval":
        return scalar_mul(alpha, self)

    def __str__(self) -> str:
        return to_text(self)

    def isclose(self, other: "Interval", tol: float = 1e-12) -> bool:
        """Endpointwise comparison with absolute tolerance ``tol``."""
        return abs(self.lo - other.lo) <= tol and abs(self.hi - other.hi) <= tol


def add(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi)


def scalar_mul(alpha: float, a: Interval) -> Interval:
    if alpha >= 0:
        return Interval(alpha * a.lo, alpha * a.hi)
    return Interval(alpha * a.hi, alpha * a.lo)


def gh_diff(a: Interval, b: Interval) -> Interval:
    """Generalized Hukuhara difference ``a ⊖gH b``."""
    d_lo = a.lo - b.lo
    d_hi = a.hi - b.hi
    return Interval(min(d_lo, d_hi), max(d_lo, d_hi))


def dominates(b: Interval, a: Interval) -> bool:
    """True when ``b`` dominates ``a``, i.e. ``a ⪰ b`` (both endpoints of ``a`` at least those of ``b``)."""
    return a.lo >= b.lo and a.hi >= b.hi


def strictly_dominates(b: Interval, a: Interval) -> bool:
    """True when ``a ≻ b``: ``b`` dominates ``a`` with at least one strict endpoint."""
    return (a.lo > b.lo and a.hi >= b.hi) or (a.lo >= b.lo and a.hi > b.hi)


def norm(a: Interval) -> float:
    return max(abs(a.lo), abs(a.hi))


def to_text(a: Interval) -> str:
    # 17 significant digits round-trip any double
    return f"[{a.lo:.17g},{a.hi:.17g}]"


_TEXT_RE = re.compile(r"^\s*\[\s*([^,\]]+?)\s*,\s*([^,\]]+?)\s*\]\s*$")


def from_text(text: str) -> Interval:
    m = _TEXT_RE.match(text)
    if m is None:
        raise ValueError(f"not an interval literal: {text!r}")
    return Interval(float(m.group(1)), float(m.group(2)))
