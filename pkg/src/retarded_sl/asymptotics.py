"""Oscillatory integrals and large-``mu`` asymptotic forms.

The four integrals are::

    U+(mu) = 1/2 int_0^pi q cos(mu Delta)          U-(mu) = 1/2 int_0^pi q sin(mu Delta)
    V+(mu) = 1/2 int_0^pi q cos(mu (2 tau - Delta))  V-(mu) = 1/2 int_0^pi q sin(mu (2 tau - Delta))

evaluated by composite 10-point Gauss-Legendre with enough panels to put
several panels on every period of the fastest phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .problem import ProblemSpec, segment_of
from .indices import SpectralIndex, mu_seed

__all__ = [
    "OscillatoryIntegrals",
    "panel_count",
    "gauss_legendre",
    "oscillatory_integrals",
    "partial_integrals",
    "mu_asymptotic",
    "phi_asymptotic",
    "xi_asymptotic",
]

GL_ORDER = 10


def panel_count(mu: float) -> int:
    return max(64, math.ceil(8 * (1 + abs(mu))))


@lru_cache(maxsize=None)
def _reference_rule(order: int = GL_ORDER):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre(a: float, b: float, panels: int, order: int = GL_ORDER):
    """Nodes and weights of the composite rule on ``[a, b]``."""
    x, w = _reference_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class OscillatoryIntegrals:
    mu: float
    u_plus: float
    u_minus: float
    v_plus: float
    v_minus: float
    panels: int
    error: float

    def as_tuple(self):
        return self.u_plus, self.u_minus, self.v_plus, self.v_minus


def _four(spec: ProblemSpec, mu: float, a: float, b: float, panels: int) -> np.ndarray:
    tau, w = gauss_legendre(a, b, panels)
    q = spec.q.sample(tau)
    d = np.zeros_like(tau) if spec.delay_is_zero else spec.delay.sample(tau)
    wq = 0.5 * w * q
    p1 = mu * d
    p2 = mu * (2 * tau - d)
    return np.array([wq @ np.cos(p1), wq @ np.sin(p1), wq @ np.cos(p2), wq @ np.sin(p2)])


def oscillatory_integrals(spec: ProblemSpec, mu: float) -> OscillatoryIntegrals:
    mu = float(mu)
    panels = panel_count(mu)
    base = _four(spec, mu, 0.0, math.pi, panels)
    fine = _four(spec, mu, 0.0, math.pi, 2 * panels)
    if mu == 0.0:
        base[1] = base[3] = 0.0
    err = float(np.max(np.abs(fine - base))) if mu != 0.0 else float(abs(fine[0] - base[0]))
    return OscillatoryIntegrals(mu, *map(float, base), panels=panels, error=err)


def partial_integrals(spec: ProblemSpec, mu: float, t: float, phase: str = "delay"):
    """``(int_0^t q cos(mu D), int_0^t q sin(mu D))`` without the factor 1/2.

    ``phase`` selects ``D = Delta`` ("delay") or ``D = 2 tau - Delta`` ("mirror").
    """
    if t <= 0.0:
        return 0.0, 0.0
    tau, w = gauss_legendre(0.0, t, panel_count(mu))
    q = spec.q.sample(tau)
    d = np.zeros_like(tau) if spec.delay_is_zero else spec.delay.sample(tau)
    if phase == "mirror":
        d = 2 * tau - d
    wq = w * q
    return float(wq @ np.cos(mu * d)), float(wq @ np.sin(mu * d))


def mu_asymptotic(spec: ProblemSpec, n: SpectralIndex, signs: str = "printed") -> float:
    """Leading-order eigenvalue estimate from the seed ``mu_n^0``.

    ``mu0 - (b1p/b2p + a1p/a2p + U+(mu0) + V+(mu0)) / (mu0 pi)``

    ``signs="initial-data"`` uses ``b1p/b2p - a1p/a2p``, the shift that roots
    of problems started from ``(mu a2p + a2m, mu a1p + a1m)`` actually follow;
    with it the remainder is ``O(1/n^2)`` rather than ``O(1/n)`` when
    ``a1p != 0``.
    """
    mu0 = mu_seed(n)
    if mu0 == 0:
        raise ValueError(f"index {n} has a zero seed")
    if signs == "printed":
        shift = spec.boundary_ratio
    elif signs == "initial-data":
        shift = spec.b1p / spec.b2p - spec.a1p / spec.a2p
    else:
        raise ValueError(f"unknown sign convention {signs!r}")
    ints = oscillatory_integrals(spec, mu0)
    return mu0 - (shift + ints.u_plus + ints.v_plus) / (mu0 * math.pi)


def phi_asymptotic(spec: ProblemSpec, t: float, mu: float) -> tuple[float, float]:
    """Truncated large-``mu`` expansions of ``phi(t, mu)`` and ``phi'(t, mu)``."""
    a1m, a1p, a2m, a2p = spec.a1m, spec.a1p, spec.a2m, spec.a2p
    # int_0^t q trig(mu (t - Delta)) and int_0^t q trig(mu (t - 2 tau + Delta))
    # expanded with the angle-addition rule around mu t
    dc, ds = partial_integrals(spec, mu, t, "delay")
    mc, ms = partial_integrals(spec, mu, t, "mirror")
    c, s = math.cos(mu * t), math.sin(mu * t)
    sin_a = s * dc - c * ds      # int q sin mu(t - Delta)
    cos_a = c * dc + s * ds      # int q cos mu(t - Delta)
    sin_b = s * mc - c * ms      # int q sin mu(t - 2 tau + Delta)
    cos_b = c * mc + s * ms      # int q cos mu(t - 2 tau + Delta)

    if segment_of(spec, t) == 0:
        y = (mu * a2p * c + a2m * c - a1p * s
             - a2p / 2 * sin_a - a2p / 2 * sin_b
             + (a1m * s - a2m / 2 * sin_a - a2m / 2 * sin_b
                + a1p / 2 * cos_a - a1p / 2 * cos_b) / mu)
        yp = (-mu * mu * a2p * s
              + mu * (-a2m * s - a1p * c - a2p / 2 * cos_a - a2p / 2 * cos_b)
              + a1m * c - a2m / 2 * cos_a - a2m / 2 * cos_b
              - a1p / 2 * sin_a + a1p / 2 * sin_b)
        return y, yp
    prod = spec.delta_product
    y = (mu * a2p * c + (a2m * c - a1p * s) - a2p / 2 * sin_a - a2p / 2 * sin_b) / prod
    yp = -(a2p * mu * mu * s
           + mu * (-a2m * s - a1p * c - a2p / 2 * cos_a - a2p / 2 * cos_b)) / prod
    return y, yp


def xi_asymptotic(spec: ProblemSpec, mu: float) -> float:
    """Characteristic function through its ``mu^3`` and ``mu^2`` orders."""
    ints = oscillatory_integrals(spec, mu)
    a2p_b2p = spec.a2p * spec.b2p
    cos_coef = spec.a2p * spec.b1p + spec.a1p * spec.b2p + a2p_b2p * (ints.u_plus + ints.v_plus)
    sin_coef = spec.a2m * spec.b2p + spec.a2p * spec.b2m + a2p_b2p * (ints.u_minus + ints.v_minus)
    prod = spec.delta_product
    return (mu ** 3 * a2p_b2p * math.sin(mu * math.pi)
            + mu * mu * (cos_coef * math.cos(mu * math.pi)
                         + sin_coef * math.sin(mu * math.pi))) / prod
