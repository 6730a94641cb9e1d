"""Limit function of scaled nodal deviations and potential reconstruction.

For large ``n`` the scaled deviation ``(mu0)^2 (t_n^j - (j - 1/2) pi / mu0)``
tends to a function ``f(t)``.  When the delay vanishes, ``f`` carries
``-1/2 int_0^t q`` and ``q`` can be read back as::

    q(t) = 2/pi (U+(0) + f(pi) - f(0)) - 2 f'(t)

``U+(0) = 1/2 int_0^pi q`` cancels out of ``f(pi) - f(0)``, so it has to be
supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import savgol_filter

from .asymptotics import oscillatory_integrals, partial_integrals
from .nodal import NodalSet, node_index_fn
from .problem import ProblemSpec

__all__ = [
    "LimitFunctionEstimate",
    "ReconstructionResult",
    "estimate_limit_function",
    "limit_function_exact",
    "delay_branch",
    "reconstruct_potential",
]


@dataclass
class LimitFunctionEstimate:
    grid: np.ndarray
    f_hat: np.ndarray
    n: int
    branch: str = "delta_zero"
    gaps: list[float] = field(default_factory=list)


@dataclass
class ReconstructionResult:
    grid: np.ndarray
    q_hat: np.ndarray
    u_plus_zero: float
    stencil: int
    f_zero: float
    f_pi: float


def _scaled_deviation(ns: NodalSet, j: int) -> float:
    mu0 = ns.seed
    return mu0 * mu0 * (ns.nodes[j - 1] - (j - 0.5) * math.pi / mu0)


def _estimate_one(ns: NodalSet, grid: np.ndarray, interpolate: bool):
    if ns.count == 0:
        raise ValueError(f"nodal set for index {ns.index} is empty")
    out = np.empty(len(grid))
    gaps = []
    devs = np.array([_scaled_deviation(ns, j) for j in range(1, ns.count + 1)])
    for k, t in enumerate(grid):
        jt = node_index_fn(ns, t)
        if jt >= ns.count:
            gaps.append(float(t))
        j = min(jt + 1, ns.count)
        if interpolate and 1 <= jt < ns.count:
            # t lies in [t^jt, t^(jt+1)): blend the two bracketing nodes
            t0, t1 = ns.nodes[jt - 1], ns.nodes[jt]
            w = (t - t0) / (t1 - t0)
            out[k] = (1 - w) * devs[jt - 1] + w * devs[jt]
        else:
            out[k] = devs[j - 1]
    return out, gaps


def estimate_limit_function(sets: list[NodalSet], grid, richardson: bool = False,
                            interpolate: bool = True, branch: str = "delta_zero"
                            ) -> LimitFunctionEstimate:
    """Scaled nodal deviations sampled on ``grid`` from the largest index.

    With ``interpolate`` the value at ``t`` is blended linearly from the two
    nodes bracketing ``t``; otherwise the node just above ``t`` is used as is.
    ``richardson`` combines the two largest indices assuming an ``O(1/n)``
    remainder.
    """
    if not sets:
        raise ValueError("no nodal sets given")
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > math.pi):
        raise ValueError("grid must lie in [0, pi]")
    ordered = sorted(sets, key=lambda s: s.seed)
    top = ordered[-1]
    f_hat, gaps = _estimate_one(top, grid, interpolate)
    if richardson and len(ordered) > 1:
        low = ordered[-2]
        f_low, _ = _estimate_one(low, grid, interpolate)
        n1, n2 = low.seed, top.seed
        f_hat = (n2 * f_hat - n1 * f_low) / (n2 - n1)
    return LimitFunctionEstimate(grid, f_hat, top.index.magnitude, branch, gaps)


def delay_branch(spec: ProblemSpec, points: int = 4097) -> str:
    """``delta_zero`` or ``delta_nonzero``; mixed delays are refused."""
    if spec.delay_is_zero:
        return "delta_zero"
    grid = np.linspace(0.0, math.pi, points)[1:-1]
    d = spec.delay.sample(grid)
    if np.all(d == 0):
        return "delta_zero"
    if np.all(d != 0):
        return "delta_nonzero"
    raise ValueError("delay vanishes on part of (0, pi); limit function undefined")


def limit_function_exact(spec: ProblemSpec, t, signs: str = "printed"):
    """Closed-form limit function.

    ``signs="printed"``::

        delta_zero:    (B + U+(0)) t/pi - a1p/a2p - 1/2 int_0^t q
        delta_nonzero: B t/pi - a1p/a2p

    with ``B = b1p/b2p + a1p/a2p``.  ``signs="initial-data"`` flips every
    ``a1p/a2p``, which is the limit actually followed by eigenfunctions
    started from ``(mu a2p + a2m, mu a1p + a1m)``.
    """
    branch = delay_branch(spec)
    ratio = spec.a1p / spec.a2p
    if signs == "initial-data":
        ratio = -ratio
    elif signs != "printed":
        raise ValueError(f"unknown sign convention {signs!r}")
    b = spec.b1p / spec.b2p + ratio
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if branch == "delta_zero":
        u0 = oscillatory_integrals(spec, 0.0).u_plus
        half_int = np.array([0.5 * partial_integrals(spec, 0.0, float(x))[0] for x in ts])
        out = (b + u0) * ts / math.pi - ratio - half_int
    else:
        out = b * ts / math.pi - ratio
    return float(out[0]) if scalar else out


def _quadratic_fit(x, y, at):
    return np.polyfit(x - at, y, 2)  # c2, c1, c0 about ``at``


def _local_slopes(grid: np.ndarray, vals: np.ndarray, stencil: int) -> np.ndarray:
    """Derivative of the least-squares quadratic through ``stencil`` neighbours."""
    steps = np.diff(grid)
    if np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        # uniform grid: Savitzky-Golay is exactly the moving quadratic fit
        return savgol_filter(vals, stencil, 2, deriv=1, delta=steps[0], mode="interp")
    out = np.empty(len(grid))
    for k, t in enumerate(grid):
        lo = min(max(k - stencil // 2, 0), len(grid) - stencil)
        sl = slice(lo, lo + stencil)
        out[k] = _quadratic_fit(grid[sl], vals[sl], t)[1]
    return out


def reconstruct_potential(f: LimitFunctionEstimate, u_plus_zero: float,
                          stencil: int = 5) -> ReconstructionResult:
    """Potential from the limit function by local quadratic least squares."""
    if f.branch != "delta_zero":
        raise ValueError("reconstruction needs a vanishing delay")
    grid, vals = np.asarray(f.grid, dtype=float), np.asarray(f.f_hat, dtype=float)
    if stencil < 3 or stencil % 2 == 0:
        raise ValueError("stencil must be an odd number >= 3")
    if stencil > len(grid):
        raise ValueError("stencil larger than grid")
    interior = (grid > 0) & (grid < math.pi)
    gi, vi = grid[interior], vals[interior]
    if len(gi) < 3:
        raise ValueError("need at least three interior grid points")
    f0 = np.polyval(_quadratic_fit(gi[:3], vi[:3], 0.0), 0.0)
    fpi = np.polyval(_quadratic_fit(gi[-3:], vi[-3:], math.pi), 0.0)
    const = 2 / math.pi * (u_plus_zero + fpi - f0)
    q_hat = const - 2 * _local_slopes(grid, vals, stencil)
    return ReconstructionResult(grid, q_hat, u_plus_zero, stencil, float(f0), float(fpi))
