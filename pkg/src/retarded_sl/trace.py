"""Regularized trace: closed-form right side and symmetric partial sums."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import oscillatory_integrals
from .indices import SpectralIndex
from .problem import ProblemSpec
from .spectrum import EigenvalueRecord

__all__ = ["TraceTerm", "TraceReport", "trace_rhs", "trace_correction", "trace_partial_sums"]


def trace_rhs(spec: ProblemSpec) -> float:
    """``-(2/pi) K - K^2 + (a2m/a2p + b2m/b2p)^2`` with ``K = b1p/b2p + a1p/a2p + U+(0) + V+(0)``."""
    ints = oscillatory_integrals(spec, 0.0)
    k = spec.boundary_ratio + ints.u_plus + ints.v_plus
    tail = spec.a2m / spec.a2p + spec.b2m / spec.b2p
    return -2 / math.pi * k - k * k + tail * tail


def trace_correction(spec: ProblemSpec, seed: float, u_plus: float | None = None,
                     v_plus: float | None = None) -> float:
    if u_plus is None or v_plus is None:
        ints = oscillatory_integrals(spec, seed)
        u_plus, v_plus = ints.u_plus, ints.v_plus
    return 4 / math.pi * (spec.boundary_ratio + u_plus + v_plus)


@dataclass(frozen=True)
class TraceTerm:
    index: SpectralIndex
    mu_sq: float
    mu0_sq: float
    u_plus: float
    v_plus: float
    correction: float

    @property
    def term(self) -> float:
        return self.mu_sq - self.mu0_sq + self.correction


@dataclass
class TraceReport:
    N: int
    partial_sums: list[float]      # entry k is S_k, k = 0..N
    rhs: float
    terms: list[TraceTerm]
    small_root_contribution: float
    diagnostics: list[str] = field(default_factory=list)

    @property
    def gaps(self) -> list[float]:
        return [abs(s - self.rhs) for s in self.partial_sums]

    @property
    def final(self) -> float:
        return self.partial_sums[-1]


def _mu_sq(root) -> float:
    return float(np.real(complex(root) ** 2))


def trace_partial_sums(spec: ProblemSpec, records: list[EigenvalueRecord], N: int) -> TraceReport:
    """Accumulate ``mu_-0^2 + mu_+0^2 + sum_{n=1..N'} (term(+n) + term(-n))``."""
    by_index = {}
    for rec in records:
        by_index[rec.index] = rec
    required = [SpectralIndex(-1, 0), SpectralIndex(1, 0)]
    for n in range(1, N + 1):
        required += [SpectralIndex(1, n), SpectralIndex(-1, n)]
    missing = [str(n) for n in required if n not in by_index]
    if missing:
        raise KeyError(f"missing eigenvalues for indices {', '.join(missing)}")

    small = _mu_sq(by_index[required[0]].root) + _mu_sq(by_index[required[1]].root)
    sums = [small]
    terms = []
    for n in range(1, N + 1):
        pair = 0.0
        for sign in (1, -1):
            rec = by_index[SpectralIndex(sign, n)]
            ints = oscillatory_integrals(spec, rec.seed)
            corr = trace_correction(spec, rec.seed, ints.u_plus, ints.v_plus)
            term = TraceTerm(rec.index, _mu_sq(rec.root), rec.seed ** 2,
                             ints.u_plus, ints.v_plus, corr)
            terms.append(term)
            pair += term.term
        sums.append(sums[-1] + pair)

    report = TraceReport(N, sums, trace_rhs(spec), terms, small)
    diffs = np.diff(sums[1:])
    if len(diffs):
        if np.all(diffs >= 0) or np.all(diffs <= 0):
            report.diagnostics.append("partial sums are monotone")
        else:
            report.diagnostics.append("partial sums are not monotone")
        pair_terms = np.diff(sums)
        report.diagnostics.append(
            f"last pair contribution {pair_terms[-1]:.6g}; gap |S_N - rhs| = {report.gaps[-1]:.6g}")
    return report
