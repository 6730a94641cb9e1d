"""Zeros of eigenfunctions, numerically and from the asymptotic formulas."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import oscillatory_integrals, partial_integrals
from .indices import SpectralIndex, mu_seed
from .integrate import DEFAULT_CONTROL, SolverControl, shoot
from .problem import ProblemSpec
from .spectrum import EigenvalueRecord

__all__ = ["NodalSet", "find_nodes", "t_factor", "nodal_asymptotic", "node_index_fn"]

SAMPLES_PER_PERIOD = 20
NODE_TOL = 1e-12


@dataclass
class NodalSet:
    index: SpectralIndex
    mu: float
    seed: float
    nodes: np.ndarray
    residuals: np.ndarray
    diagnostics: list[str] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)


def find_nodes(spec: ProblemSpec, rec: EigenvalueRecord,
               control: SolverControl = DEFAULT_CONTROL) -> NodalSet:
    """All sign changes of ``phi(., mu_n)`` in ``(0, pi)``, bisected to 1e-12.

    Sign changes are looked for inside each segment only, so a negative
    jump factor at ``theta_i`` is not mistaken for a zero.
    """
    mu = float(np.real(rec.root))
    if not mu > 0 or (isinstance(rec.root, complex) and rec.root.imag != 0):
        raise ValueError("find_nodes needs a real positive eigenvalue")
    sol = shoot(spec, mu, control)
    step = math.pi / (SAMPLES_PER_PERIOD * (1 + mu))
    edges = spec.edges
    lo_list, hi_list = [], []
    for i in range(spec.m + 1):
        a, b = edges[i], edges[i + 1]
        n = max(2, math.ceil((b - a) / step) + 1)
        grid = np.linspace(a, b, n)
        y = _segment_values(sol, i, grid)
        s = np.sign(y)
        for k in np.nonzero(s[:-1] * s[1:] < 0)[0]:
            lo_list.append((i, grid[k]))
            hi_list.append(grid[k + 1])
        # exact zeros on interior grid points
        for k in np.nonzero(s[1:-1] == 0)[0] + 1:
            lo_list.append((i, grid[k]))
            hi_list.append(grid[k])
    nodes, residuals = [], []
    for (i, lo), hi in zip(lo_list, hi_list):
        if lo == hi:
            root = lo
        else:
            root = _bisect_segment(sol, i, lo, hi)
        yv, ypv = (v[0] for v in _segment_values(sol, i, np.array([root]), with_derivative=True))
        amp = math.hypot(float(np.real(yv)), float(np.real(ypv)) / mu)
        residuals.append(abs(float(np.real(yv))) / amp if amp > 0 else 0.0)
        nodes.append(root)
    order = np.argsort(nodes)
    nodes = np.asarray(nodes)[order]
    residuals = np.asarray(residuals)[order]
    nodes_in = (nodes > 0) & (nodes < math.pi)
    ns = NodalSet(rec.index, mu, mu_seed(rec.index), nodes[nodes_in], residuals[nodes_in])
    expected = round(mu)
    if abs(ns.count - expected) > 1:
        ns.diagnostics.append(f"{ns.count} nodes for mu={mu:.6g}, expected about {expected}")
    if rec.index.magnitude and ns.count != rec.index.magnitude:
        ns.diagnostics.append(f"{ns.count} nodes for index {rec.index}")
    return ns


def _segment_values(sol, i, ts, with_derivative=False):
    from .integrate import _hermite_segment
    sl = sol.segment(i)
    y, yp = _hermite_segment(sol.t[sl], sol.y[sl], sol.yp[sl],
                             None if sol.ypp is None else sol.ypp[sl], ts)
    if with_derivative:
        return np.real(y), np.real(yp)
    return np.real(y)


def _bisect_segment(sol, i, lo, hi):
    flo = _segment_values(sol, i, np.array([lo]))[0]
    while hi - lo > NODE_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = _segment_values(sol, i, np.array([mid]))[0]
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t_factor(spec: ProblemSpec, mu: float, t: float) -> float:
    """``mu a2p + a2m - (a2p/2) Is - (a2m/2mu) Is + (a1p/2mu) Ic`` over ``[0, t]``."""
    if mu == 0:
        raise ValueError("mu must be nonzero")
    ic, is_ = partial_integrals(spec, mu, t, "delay")
    return (mu * spec.a2p + spec.a2m - spec.a2p / 2 * is_
            - spec.a2m / (2 * mu) * is_ + spec.a1p / (2 * mu) * ic)


def nodal_asymptotic(spec: ProblemSpec, n, j: int, signs: str = "printed") -> float:
    """Asymptotic position of node ``j`` of eigenfunction ``n``.

    ``signs="printed"``: the first half of the nodes uses the ``T``-factor
    form, the second half the ``1/mu0^2`` form; both carry only ``U+`` in
    the eigenvalue shift and integrate ``q cos(mu0 Delta)`` up to ``j pi / n``.

    ``signs="initial-data"``: one ``1/mu0^2`` form for all ``j`` with the
    signs that eigenfunctions started from ``(mu a2p + a2m, mu a1p + a1m)``
    actually follow::

        (j - 1/2) pi (1/mu0 + (b1p/b2p - a1p/a2p + U+) / (mu0^3 pi))
            + (a1p/a2p - 1/2 int_0^{j pi/n} q cos(mu0 Delta)) / mu0^2
    """
    n = SpectralIndex.of(n)
    nn = n.magnitude
    if not 1 <= j <= nn:
        raise ValueError(f"j={j} outside 1..{nn}")
    if signs not in ("printed", "initial-data"):
        raise ValueError(f"unknown sign convention {signs!r}")
    mu0 = mu_seed(n)
    if mu0 == 0:
        raise ValueError(f"index {n} has a zero seed")
    u_plus = oscillatory_integrals(spec, mu0).u_plus
    upper = j * math.pi / nn
    ic, _ = partial_integrals(spec, mu0, upper, "delay")
    ratio = spec.a1p / spec.a2p
    if signs == "initial-data":
        b = spec.b1p / spec.b2p - ratio
        shift = (j - 0.5) * math.pi * (1 / mu0 + (b + u_plus) / (mu0 ** 3 * math.pi))
        return shift + (ratio - 0.5 * ic) / mu0 ** 2
    shift = (j - 0.5) * math.pi * (1 / mu0 - (spec.boundary_ratio + u_plus) / (mu0 ** 3 * math.pi))
    if j <= nn // 2:
        t0 = t_factor(spec, mu0, upper)
        return shift + spec.a1p / (mu0 * t0) + spec.a2p / (2 * mu0 * t0) * ic
    return shift + (ratio + 0.5 * ic) / mu0 ** 2


def node_index_fn(ns: NodalSet, t: float) -> int:
    """Largest ``j`` with ``t_n^j <= t`` (0 before the first node)."""
    if not 0 <= t <= math.pi:
        raise ValueError(f"t={t!r} outside [0, pi]")
    return bisect.bisect_right(list(ns.nodes), t)
