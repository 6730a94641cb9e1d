"""Boundary-value problem with retarded argument and transmission points.

The differential equation is ``y'' + q(t) y(t - Delta(t)) + mu^2 y = 0`` on
``[0, pi]`` cut at interior points ``theta_1 < ... < theta_m``.  Boundary
conditions are linear in ``mu``::

    (a1m + mu a1p) y(0)  - (a2m + mu a2p) y'(0)  = 0
    (b1m + mu b1p) y(pi) - (b2m + mu b2p) y'(pi) = 0

and across each ``theta_i`` both ``y`` and ``y'`` jump by the factor
``1/delta_i``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .expr import ExprDomainError, ScalarFunction, load_function

__all__ = ["ProblemSpec", "Violation", "ValidationReport", "validate", "segment_of"]

VALIDATION_POINTS = 4097
ROUNDOFF = 1e-12


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    theta: tuple[float, ...]
    delta: tuple[float, ...]
    a1m: float
    a1p: float
    a2m: float
    a2p: float
    b1m: float
    b1p: float
    b2m: float
    b2p: float
    q: ScalarFunction
    delay: ScalarFunction
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(x) for x in self.theta))
        object.__setattr__(self, "delta", tuple(float(x) for x in self.delta))
        if len(self.theta) != len(self.delta):
            raise ValueError("theta and delta must have the same length")
        for name in ("a1m", "a1p", "a2m", "a2p", "b1m", "b1p", "b2m", "b2p"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "q", load_function(self.q))
        object.__setattr__(self, "delay", load_function(self.delay))

    @property
    def m(self) -> int:
        return len(self.theta)

    @property
    def edges(self) -> tuple[float, ...]:
        """Segment boundaries ``0, theta_1, ..., theta_m, pi``."""
        return (0.0, *self.theta, math.pi)

    @property
    def delta_product(self) -> float:
        return math.prod(self.delta)

    @property
    def delay_is_zero(self) -> bool:
        return bool(getattr(self.delay, "is_zero", False))

    @property
    def q_is_zero(self) -> bool:
        return bool(getattr(self.q, "is_zero", False))

    @property
    def boundary_ratio(self) -> float:
        """``b1p/b2p + a1p/a2p``, the constant shift in the eigenvalue asymptotics."""
        return self.b1p / self.b2p + self.a1p / self.a2p

    def replace(self, **changes) -> "ProblemSpec":
        fields = {k: getattr(self, k) for k in (
            "theta", "delta", "a1m", "a1p", "a2m", "a2p",
            "b1m", "b1p", "b2m", "b2p", "q", "delay", "name")}
        fields.update(changes)
        return ProblemSpec(**fields)

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "ProblemSpec":
        alpha = data.get("alpha", {})
        beta = data.get("beta", {})
        return cls(
            theta=tuple(data.get("theta", ())),
            delta=tuple(data.get("delta", ())),
            a1m=alpha.get("a1m", 0.0), a1p=alpha.get("a1p", 0.0),
            a2m=alpha.get("a2m", 0.0), a2p=alpha.get("a2p", 0.0),
            b1m=beta.get("b1m", 0.0), b1p=beta.get("b1p", 0.0),
            b2m=beta.get("b2m", 0.0), b2p=beta.get("b2p", 0.0),
            q=load_function(data.get("q", "0"), base_dir),
            delay=load_function(data.get("delay", "0"), base_dir),
            name=data.get("name", ""),
        )

    def to_dict(self) -> dict:
        def fn(f):
            src = getattr(f, "source", None)
            return {"table": src} if src is not None and not hasattr(f, "kind") else str(f)

        return {
            "name": self.name,
            "theta": list(self.theta),
            "delta": list(self.delta),
            "alpha": {"a1m": self.a1m, "a1p": self.a1p, "a2m": self.a2m, "a2p": self.a2p},
            "beta": {"b1m": self.b1m, "b1p": self.b1p, "b2m": self.b2m, "b2p": self.b2p},
            "q": fn(self.q),
            "delay": fn(self.delay),
        }


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    t: float | None = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


def validate(spec: ProblemSpec) -> ValidationReport:
    """Check coefficient constraints and sample ``q``, ``Delta`` on a fixed grid."""
    report = ValidationReport()
    bad = report.violations.append

    theta = spec.theta
    if any(not (0.0 < x < math.pi) for x in theta):
        bad(Violation("theta_range", "interior points must lie in (0, pi)"))
    if any(b <= a for a, b in zip(theta, theta[1:])):
        bad(Violation("theta_order", "interior points must be strictly increasing"))
    for i, d in enumerate(spec.delta, start=1):
        if d == 0.0 or not math.isfinite(d):
            bad(Violation("delta_nonzero", f"delta_{i} must be a nonzero finite number"))
    if spec.a2p * spec.b2p == 0.0:
        bad(Violation("a2p_b2p_nonzero", "a2p * b2p must be nonzero"))

    grid = np.linspace(0.0, math.pi, VALIDATION_POINTS)
    qv = dv = None
    try:
        qv = spec.q.sample(grid)
    except (ExprDomainError, ValueError) as exc:
        bad(Violation("q_domain", str(exc), getattr(exc, "t", None)))
    try:
        dv = spec.delay.sample(grid)
    except (ExprDomainError, ValueError) as exc:
        bad(Violation("delay_domain", str(exc), getattr(exc, "t", None)))

    if qv is not None and not np.all(np.isfinite(qv)):
        bad(Violation("q_domain", "q is not finite", float(grid[~np.isfinite(qv)][0])))
    if dv is not None:
        if not np.all(np.isfinite(dv)):
            bad(Violation("delay_domain", "delay is not finite", float(grid[~np.isfinite(dv)][0])))
        else:
            neg = dv < -ROUNDOFF
            if np.any(neg):
                bad(Violation("delay_nonnegative", "delay must be >= 0", float(grid[neg][0])))
            retarded = grid - dv
            back = retarded < -ROUNDOFF
            if np.any(back):
                bad(Violation("delayed-argument negative",
                              "t - delay(t) must be >= 0", float(grid[back][0])))
            # stricter per-segment reading, reported only
            edges = spec.edges
            for i in range(2, spec.m + 1):
                inside = (grid > edges[i]) & (grid < edges[i + 1])
                short = inside & (retarded < edges[i] - ROUNDOFF)
                if np.any(short):
                    report.warnings.append(Violation(
                        "segment_delay",
                        f"t - delay(t) leaves segment {i} (reaches before theta_{i})",
                        float(grid[short][0])))
    return report


def segment_of(spec: ProblemSpec, t: float) -> int:
    """Index ``i`` with ``t`` in ``[theta_i, theta_{i+1})``; ``pi`` maps to ``m``."""
    return segment_index(spec.edges, t)


def segment_index(edges: Sequence[float], t: float) -> int:
    m = len(edges) - 2
    if not (edges[0] <= t <= edges[-1]):
        raise ValueError(f"t={t!r} outside [0, pi]")
    return min(bisect.bisect_right(edges, t) - 1, m)
