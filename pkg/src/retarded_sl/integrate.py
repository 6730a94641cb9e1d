"""Shooting solution of the retarded equation across transmission points.

``shoot`` integrates ``y'' = -q(t) y(t - Delta(t)) - mu^2 y`` from the initial
state ``(mu a2p + a2m, mu a1p + a1m)`` with a fixed-step classical RK4.
Delayed values come from cubic-Hermite dense output of the already-computed
history; when the retarded point falls inside the step being taken the step
is repeated against its own provisional interpolant.  At each ``theta_i``
the state is divided by ``delta_i``.

``picard_solve`` is an independent check: it iterates the Volterra integral
form of the same problem on a uniform grid with trapezoidal quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np
from scipy.integrate import cumulative_trapezoid

from .problem import ROUNDOFF, ProblemSpec, segment_index

__all__ = [
    "SolverControl",
    "PiecewiseSolution",
    "SolverError",
    "shoot",
    "picard_solve",
    "eval_solution",
    "step_size",
    "DEFAULT_CONTROL",
    "PRECISE_CONTROL",
]


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverControl:
    h_max: float = math.pi / 2000
    c_osc: float = 8.0
    tol_step: float = 1e-12
    max_iter: int = 5

    def __post_init__(self):
        if not self.h_max > 0:
            raise ValueError("h_max must be positive")
        if not self.c_osc >= 1:
            raise ValueError("c_osc must be >= 1")
        if not self.tol_step > 0:
            raise ValueError("tol_step must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def refined(self, factor: float) -> "SolverControl":
        return SolverControl(self.h_max / factor, self.c_osc, self.tol_step, self.max_iter)


DEFAULT_CONTROL = SolverControl()
# ten times finer; needed for 1e-9 agreement on closed-form spectra
PRECISE_CONTROL = SolverControl(h_max=math.pi / 20000)


def step_size(mu, control: SolverControl = DEFAULT_CONTROL) -> float:
    return min(control.h_max, control.c_osc * math.pi / (1.0 + abs(mu)) * control.h_max)


@dataclass(frozen=True, eq=False)
class PiecewiseSolution:
    """Nodes and states of ``phi(., mu)`` per segment, with Hermite dense output.

    ``y``, ``yp`` and ``ypp`` are flat arrays; segment ``i`` owns the slice
    ``offsets[i]:offsets[i+1]``.  The first node of segment ``i >= 1`` holds
    the post-jump state at ``theta_i`` and the last node of segment ``i - 1``
    the pre-jump state.
    """

    mu: complex | float
    edges: np.ndarray
    deltas: np.ndarray
    offsets: np.ndarray
    t: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    ypp: np.ndarray | None = None

    @property
    def field(self) -> str:
        return "complex" if np.iscomplexobj(self.y) else "real"

    @property
    def m(self) -> int:
        return len(self.edges) - 2

    def segment(self, i: int) -> slice:
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    def segment_nodes(self, i: int) -> np.ndarray:
        return self.t[self.segment(i)]

    def left_limit(self, i: int) -> tuple:
        """State just before ``theta_i`` (end of segment ``i - 1``)."""
        k = int(self.offsets[i]) - 1
        return self.y[k], self.yp[k]

    def right_limit(self, i: int) -> tuple:
        k = int(self.offsets[i])
        return self.y[k], self.yp[k]

    def end_state(self) -> tuple:
        return self.y[-1], self.yp[-1]

    def __call__(self, t: float) -> tuple:
        return eval_solution(self, t)

    def sample(self, ts) -> tuple[np.ndarray, np.ndarray]:
        """Dense output at many points (right-continuous at ``theta_i``)."""
        ts = np.asarray(ts, dtype=float)
        if np.any(ts < 0) or np.any(ts > self.edges[-1]):
            raise ValueError("sample points must lie in [0, pi]")
        seg = np.searchsorted(self.edges, ts, side="right") - 1
        seg = np.minimum(seg, self.m)
        ys = np.empty(ts.shape, dtype=self.y.dtype)
        yps = np.empty(ts.shape, dtype=self.y.dtype)
        for i in np.unique(seg):
            mask = seg == i
            sl = self.segment(i)
            ys[mask], yps[mask] = _hermite_segment(
                self.t[sl], self.y[sl], self.yp[sl],
                None if self.ypp is None else self.ypp[sl], ts[mask])
        return ys, yps


def _hermite_segment(t, y, yp, ypp, x):
    k = np.clip(np.searchsorted(t, x, side="right") - 1, 0, len(t) - 2)
    h = t[k + 1] - t[k]
    s = (x - t[k]) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    yv = h00 * y[k] + h10 * h * yp[k] + h01 * y[k + 1] + h11 * h * yp[k + 1]
    if ypp is not None:
        ypv = h00 * yp[k] + h10 * h * ypp[k] + h01 * yp[k + 1] + h11 * h * ypp[k + 1]
    else:
        # derivative of the cubic for y
        d00 = 6 * s * (s - 1) / h
        d10 = (1 - s) * (1 - 3 * s)
        d01 = -d00
        d11 = s * (3 * s - 2)
        ypv = d00 * y[k] + d10 * yp[k] + d01 * y[k + 1] + d11 * yp[k + 1]
    # nodes reproduce stored states exactly
    exact = s == 0
    if np.any(exact):
        yv = np.where(exact, y[k], yv)
        ypv = np.where(exact, yp[k], ypv)
    exact = s == 1
    if np.any(exact):
        yv = np.where(exact, y[k + 1], yv)
        ypv = np.where(exact, yp[k + 1], ypv)
    return yv, ypv


def eval_solution(sol: PiecewiseSolution, t: float) -> tuple:
    """``(y, y')`` at ``t``; at ``theta_i`` the post-jump state is returned."""
    if not (0.0 <= t <= sol.edges[-1]):
        raise ValueError(f"t={t!r} outside [0, pi]")
    ys, yps = sol.sample(np.array([t]))
    return ys[0], yps[0]


# ---------------------------------------------------------------------------
# RK4 core

@numba.njit(cache=True)
def _hermite(y0, v0, y1, v1, h, s):
    h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s)
    h10 = s * (1.0 - s) * (1.0 - s)
    h01 = s * s * (3.0 - 2.0 * s)
    h11 = s * s * (s - 1.0)
    return h00 * y0 + h10 * h * v0 + h01 * y1 + h11 * h * v1


@numba.njit(cache=True)
def _lookup(s, seg_cur, k_cur, edges, nsteps, hs, off, Y, V):
    """Committed history value y(s) for s <= t_{k_cur} of segment seg_cur."""
    m = len(edges) - 2
    j = 0
    while j < m and edges[j + 1] <= s:
        j += 1
    if j > seg_cur:
        j = seg_cur
    u = (s - edges[j]) / hs[j]
    idx = int(math.floor(u))
    if idx < 0:
        idx = 0
    last = nsteps[j] - 1
    if j == seg_cur and idx >= k_cur:
        return Y[off[j] + k_cur]
    if idx > last:
        idx = last
    x = u - idx
    if x > 1.0:
        x = 1.0
    p = off[j] + idx
    if x == 0.0:
        return Y[p]
    if x == 1.0:
        return Y[p + 1]
    return _hermite(Y[p], V[p], Y[p + 1], V[p + 1], hs[j], x)


@numba.njit(cache=True)
def _integrate(mu2, edges, nsteps, hs, off, hoff, qh, dh, deltas, y0, v0,
               tol, maxit, Y, V, A, status):
    m = len(edges) - 2
    Y[0] = y0
    V[0] = v0
    if dh[0] > ROUNDOFF:
        status[0] = 2
        return
    A[0] = -qh[0] * y0 - mu2 * y0
    for i in range(m + 1):
        h = hs[i]
        base = off[i]
        hb = hoff[i]
        if i > 0:
            # jump across theta_i
            Y[base] = Y[base - 1] / deltas[i - 1]
            V[base] = V[base - 1] / deltas[i - 1]
            d = dh[hb]
            if d == 0.0:
                yd = Y[base]
            else:
                s = edges[i] - d
                if s < -ROUNDOFF:
                    status[0] = 2
                    return
                if s < 0.0:
                    s = 0.0
                yd = _lookup(s, i, 0, edges, nsteps, hs, off, Y, V)
            A[base] = -qh[hb] * yd - mu2 * Y[base]
        for k in range(nsteps[i]):
            tk = edges[i] + k * h
            yk = Y[base + k]
            vk = V[base + k]
            ak = A[base + k]
            # provisional end state for in-step delayed values
            yp1 = yk + h * vk + 0.5 * h * h * ak
            vp1 = vk + h * ak
            yn = yk
            vn = vk
            for it in range(maxit + 1):
                instep = False
                # stage 1 (tau = t_k): retarded point is committed history
                d = dh[hb + 2 * k]
                if d == 0.0:
                    yd = yk
                else:
                    s = tk - d
                    if s < -ROUNDOFF:
                        status[0] = 2
                        return
                    if s < 0.0:
                        s = 0.0
                    yd = _lookup(s, i, k, edges, nsteps, hs, off, Y, V)
                k1y = vk
                k1v = -qh[hb + 2 * k] * yd - mu2 * yk
                # stages 2, 3 (tau = t_k + h/2)
                tau = tk + 0.5 * h
                d = dh[hb + 2 * k + 1]
                qm = qh[hb + 2 * k + 1]
                y2 = yk + 0.5 * h * k1y
                v2 = vk + 0.5 * h * k1v
                if d == 0.0:
                    yd2 = y2
                else:
                    s = tau - d
                    if s < -ROUNDOFF:
                        status[0] = 2
                        return
                    if s < 0.0:
                        s = 0.0
                    if s > tk:
                        instep = True
                        yd2 = _hermite(yk, vk, yp1, vp1, h, (s - tk) / h)
                    else:
                        yd2 = _lookup(s, i, k, edges, nsteps, hs, off, Y, V)
                k2y = v2
                k2v = -qm * yd2 - mu2 * y2
                y3 = yk + 0.5 * h * k2y
                v3 = vk + 0.5 * h * k2v
                if d == 0.0:
                    yd3 = y3
                else:
                    yd3 = yd2
                k3y = v3
                k3v = -qm * yd3 - mu2 * y3
                # stage 4 (tau = t_k + h)
                tau = tk + h
                d = dh[hb + 2 * k + 2]
                y4 = yk + h * k3y
                v4 = vk + h * k3v
                if d == 0.0:
                    yd4 = y4
                else:
                    s = tau - d
                    if s < -ROUNDOFF:
                        status[0] = 2
                        return
                    if s < 0.0:
                        s = 0.0
                    if s > tk:
                        instep = True
                        yd4 = _hermite(yk, vk, yp1, vp1, h, (s - tk) / h)
                    else:
                        yd4 = _lookup(s, i, k, edges, nsteps, hs, off, Y, V)
                k4y = v4
                k4v = -qh[hb + 2 * k + 2] * yd4 - mu2 * y4
                yn = yk + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
                vn = vk + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
                if not instep:
                    break
                change = abs(yn - yp1) + abs(vn - vp1)
                yp1 = yn
                vp1 = vn
                if it > 0 and change < tol * (1.0 + abs(yn) + abs(vn)):
                    break
                if it == maxit:
                    status[1] += 1
            Y[base + k + 1] = yn
            V[base + k + 1] = vn
            d = dh[hb + 2 * k + 2]
            if d == 0.0:
                yd = yn
            else:
                s = tk + h - d
                if s < 0.0:
                    s = 0.0
                yd = _lookup(s, i, k + 1, edges, nsteps, hs, off, Y, V)
            A[base + k + 1] = -qh[hb + 2 * k + 2] * yd - mu2 * yn


@dataclass(frozen=True, eq=False)
class _Grid:
    edges: np.ndarray
    nsteps: np.ndarray
    hs: np.ndarray
    off: np.ndarray
    hoff: np.ndarray
    t: np.ndarray
    qh: np.ndarray
    dh: np.ndarray


def _grid(spec: ProblemSpec, h: float) -> _Grid:
    return _grid_cached(spec, round(h, 15))


@lru_cache(maxsize=64)
def _grid_cached(spec: ProblemSpec, h: float) -> _Grid:
    edges = np.array(spec.edges)
    lengths = np.diff(edges)
    nsteps = np.maximum(1, np.ceil(lengths / h - 1e-9)).astype(np.int64)
    hs = lengths / nsteps
    off = np.concatenate([[0], np.cumsum(nsteps + 1)]).astype(np.int64)
    hoff = np.concatenate([[0], np.cumsum(2 * nsteps + 1)]).astype(np.int64)
    t_nodes = []
    t_half = []
    for i in range(len(nsteps)):
        t_nodes.append(edges[i] + hs[i] * np.arange(nsteps[i] + 1))
        t_half.append(edges[i] + 0.5 * hs[i] * np.arange(2 * nsteps[i] + 1))
    t_nodes = np.concatenate(t_nodes)
    t_half = np.concatenate(t_half)
    # land exactly on the segment ends
    for i in range(len(nsteps)):
        t_nodes[off[i + 1] - 1] = edges[i + 1]
        t_half[hoff[i + 1] - 1] = edges[i + 1]
    qh = np.ascontiguousarray(spec.q.sample(t_half), dtype=float)
    if spec.delay_is_zero:
        dh = np.zeros_like(t_half)
    else:
        dh = np.ascontiguousarray(spec.delay.sample(t_half), dtype=float)
        dh[(dh < 0) & (dh >= -ROUNDOFF)] = 0.0
    return _Grid(edges, nsteps, hs, off, hoff, t_nodes, qh, dh)


def shoot(spec: ProblemSpec, mu, control: SolverControl = DEFAULT_CONTROL,
          complex_mode: bool | None = None) -> PiecewiseSolution:
    """Integrate ``phi(., mu)`` over ``[0, pi]`` from the left boundary data."""
    is_complex = isinstance(mu, complex) or np.iscomplexobj(mu)
    if complex_mode is not None:
        is_complex = is_complex or complex_mode
    dtype = np.complex128 if is_complex else np.float64
    mu = complex(mu) if is_complex else float(mu)
    grid = _grid(spec, step_size(mu, control))
    n = int(grid.off[-1])
    Y = np.zeros(n, dtype=dtype)
    V = np.zeros(n, dtype=dtype)
    A = np.zeros(n, dtype=dtype)
    status = np.zeros(2, dtype=np.int64)
    y0 = dtype(mu * spec.a2p + spec.a2m)
    v0 = dtype(mu * spec.a1p + spec.a1m)
    _integrate(dtype(mu * mu), grid.edges, grid.nsteps, grid.hs, grid.off, grid.hoff,
               grid.qh, grid.dh, np.array(spec.delta, dtype=float), y0, v0,
               control.tol_step, control.max_iter, Y, V, A, status)
    if status[0] == 2:
        raise SolverError("retarded argument t - delay(t) is negative")
    return PiecewiseSolution(mu, grid.edges, np.array(spec.delta, dtype=float),
                             grid.off, grid.t, Y, V, A)


def end_state(spec: ProblemSpec, mu, control: SolverControl = DEFAULT_CONTROL) -> tuple:
    sol = shoot(spec, mu, control)
    return sol.y[-1], sol.yp[-1]


# ---------------------------------------------------------------------------
# Picard oracle

def picard_solve(spec: ProblemSpec, mu, iterations: int = 8,
                 nodes_per_segment: int = 20000) -> PiecewiseSolution:
    """Successive approximations of the integral form, segment by segment.

    On segment ``i`` with left end ``a`` and initial data ``(A, B)``::

        y(t)  = A cos mu(t-a) + B/mu sin mu(t-a)
                - 1/mu int_a^t q(tau) sin mu(t-tau) y(tau - Delta(tau)) dtau
        y'(t) = -mu A sin mu(t-a) + B cos mu(t-a)
                - int_a^t q(tau) cos mu(t-tau) y(tau - Delta(tau)) dtau

    The integral splits into ``sin(mu t) C(t) - cos(mu t) S(t)`` with running
    trapezoidal sums ``C``, ``S``.  Retarded values behind ``a`` are read from
    the finished earlier segments; values inside the segment from the
    previous iterate (linear interpolation).
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if mu == 0:
        raise ValueError("mu must be nonzero")
    is_complex = isinstance(mu, complex) or np.iscomplexobj(mu)
    dtype = np.complex128 if is_complex else np.float64
    mu = complex(mu) if is_complex else float(mu)
    edges = np.array(spec.edges)
    m = spec.m
    ts, ys, yps = [], [], []
    A = mu * spec.a2p + spec.a2m
    B = mu * spec.a1p + spec.a1m

    def history(s):
        out = np.empty(s.shape, dtype=dtype)
        seg = np.minimum(np.searchsorted(edges, s, side="right") - 1, m)
        for j in np.unique(seg):
            mask = seg == j
            out[mask] = np.interp(s[mask], ts[j], ys[j].real) + (
                1j * np.interp(s[mask], ts[j], ys[j].imag) if is_complex else 0.0)
        return out

    for i in range(m + 1):
        a, b = edges[i], edges[i + 1]
        t = np.linspace(a, b, nodes_per_segment)
        t[-1] = b
        q = spec.q.sample(t)
        if spec.delay_is_zero:
            d = np.zeros_like(t)
        else:
            d = spec.delay.sample(t)
        s = t - d
        if np.any(s < -ROUNDOFF):
            raise SolverError("retarded argument t - delay(t) is negative")
        s = np.clip(s, 0.0, None)
        inside = s >= a
        outside_vals = history(s[~inside]) if np.any(~inside) else None
        c, sn = np.cos(mu * t), np.sin(mu * t)
        ca, sa = np.cos(mu * a), np.sin(mu * a)
        # cos mu(t-a), sin mu(t-a)
        cta = c * ca + sn * sa
        sta = sn * ca - c * sa
        y = (A * cta + B / mu * sta).astype(dtype)
        yp = (-mu * A * sta + B * cta).astype(dtype)
        free_y, free_yp = y.copy(), yp.copy()
        for _ in range(iterations):
            delayed = np.empty(t.shape, dtype=dtype)
            if outside_vals is not None:
                delayed[~inside] = outside_vals
            if np.any(inside):
                si = s[inside]
                delayed[inside] = np.interp(si, t, y.real) + (
                    1j * np.interp(si, t, y.imag) if is_complex else 0.0)
            g = q * delayed
            C = cumulative_trapezoid(g * c, t, initial=0)
            S = cumulative_trapezoid(g * sn, t, initial=0)
            y = free_y - (sn * C - c * S) / mu
            yp = free_yp - (c * C + sn * S)
        ts.append(t)
        ys.append(y)
        yps.append(yp)
        if i < m:
            A = y[-1] / spec.delta[i]
            B = yp[-1] / spec.delta[i]
    offsets = np.concatenate([[0], np.cumsum([len(x) for x in ts])]).astype(np.int64)
    return PiecewiseSolution(mu, edges, np.array(spec.delta, dtype=float), offsets,
                             np.concatenate(ts), np.concatenate(ys), np.concatenate(yps))

