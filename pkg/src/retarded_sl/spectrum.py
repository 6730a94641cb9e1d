"""Characteristic function and eigenvalue search.

Eigenvalues of the problem are the squares of the zeros of::

    Xi(mu) = (mu b1p + b1m) phi(pi, mu) - (mu b2p + b2m) phi'(pi, mu)

Indices with ``|mu_n^0| >= 2`` are bracketed around the asymptotic estimate;
the cluster near the origin is found by a dense scan.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .asymptotics import mu_asymptotic
from .indices import SpectralIndex, mu_seed
from .integrate import DEFAULT_CONTROL, SolverControl, shoot
from .problem import ProblemSpec

__all__ = [
    "EigenvalueRecord",
    "NoConvergence",
    "xi",
    "xi0",
    "find_eigenvalue",
    "scan_small_roots",
    "verify_simplicity",
    "compute_spectrum",
    "residual_tolerance",
]

log = logging.getLogger(__name__)

BISECTION_WIDTH = 1e-12
SCAN_STEP = 1e-3


class NoConvergence(RuntimeError):
    pass


@dataclass
class EigenvalueRecord:
    index: SpectralIndex
    seed: float
    estimate: float
    root: complex | float
    residual: float
    method: str
    iterations: int
    bracket: tuple[float, float] | None = None
    multiplicity: int = 1
    notes: list[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.residual <= residual_tolerance(self.root)

    @property
    def mu(self) -> float:
        """Real part of the root."""
        return float(np.real(self.root))


def residual_tolerance(mu) -> float:
    return 1e-8 * (1 + abs(mu) ** 3)


def xi(spec: ProblemSpec, mu, control: SolverControl = DEFAULT_CONTROL):
    """Characteristic function from the shooting solution at ``pi``."""
    sol = shoot(spec, mu, control)
    y, yp = sol.y[-1], sol.yp[-1]
    val = (mu * spec.b1p + spec.b1m) * y - (mu * spec.b2p + spec.b2m) * yp
    if isinstance(val, complex) or np.iscomplexobj(val):
        val = complex(val)
        if not isinstance(mu, complex) and abs(val.imag) <= 1e-12 * max(1.0, abs(val.real)):
            return val.real
        return val
    return float(val)


def xi0(spec: ProblemSpec, mu):
    """Leading term ``mu^3 a2p b2p / prod(delta) sin(mu pi)``."""
    if isinstance(mu, complex):
        import cmath
        return mu ** 3 * spec.a2p * spec.b2p / spec.delta_product * cmath.sin(mu * math.pi)
    return mu ** 3 * spec.a2p * spec.b2p / spec.delta_product * math.sin(mu * math.pi)


def _bisect(f, a, fa, b, fb, width=BISECTION_WIDTH):
    iters = 0
    while b - a > width:
        c = 0.5 * (a + b)
        if c <= a or c >= b:
            break
        fc = f(c)
        iters += 1
        if fc == 0:
            return c, c, iters
        if (fc > 0) == (fa > 0):
            a, fa = c, fc
        else:
            b, fb = c, fc
    return a, b, iters


def _complex_secant(f, x0, x1, max_iter=60):
    f0, f1 = f(x0), f(x1)
    for it in range(1, max_iter + 1):
        denom = f1 - f0
        if denom == 0:
            break
        x2 = x1 - f1 * (x1 - x0) / denom
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        if abs(x1 - x0) <= 1e-13 * (1 + abs(x1)):
            return x1, f1, it
    return x1, f1, max_iter


def find_eigenvalue(spec: ProblemSpec, n, radius: float = 0.25,
                    control: SolverControl = DEFAULT_CONTROL) -> EigenvalueRecord:
    """Root of ``Xi`` near the asymptotic estimate for index ``n``."""
    n = SpectralIndex.of(n)
    seed = mu_seed(n)
    if seed == 0:
        raise ValueError(f"index {n} has a zero seed; use scan_small_roots")
    estimate = mu_asymptotic(spec, n)

    def f(mu):
        return xi(spec, mu, control)

    total = 0
    r = radius
    for _ in range(3):
        a, b = estimate - r, estimate + r
        fa, fb = f(a), f(b)
        total += 2
        if fa == 0 or fb == 0 or (fa > 0) != (fb > 0):
            if fa == 0:
                lo = hi = a
            elif fb == 0:
                lo = hi = b
            else:
                lo, hi, iters = _bisect(f, a, fa, b, fb)
                total += iters
            root = 0.5 * (lo + hi)
            return EigenvalueRecord(n, seed, estimate, root, abs(f(root)), "bisection",
                                    total, bracket=(lo, hi))
        r *= 2

    best = None
    for start in (complex(estimate), complex(estimate, 0.01)):
        root, val, iters = _complex_secant(f, start, start + 1e-3)
        total += iters + 2
        rec = EigenvalueRecord(n, seed, estimate, root, abs(val), "complex-secant", total)
        if rec.converged:
            if abs(root.imag) <= 1e-12 * (1 + abs(root)):
                rec.root = root.real
            return rec
        if best is None or rec.residual < best.residual:
            best = rec
    best.notes.append("no convergence")
    raise NoConvergence(f"no root found for index {n} near {estimate:.10g}")


@dataclass
class SmallRootScan:
    records: list[EigenvalueRecord]
    roots: list[tuple[float, int]]
    diagnostics: list[str]


def scan_small_roots(spec: ProblemSpec, bound: float = 2.5, step: float = SCAN_STEP,
                     control: SolverControl = DEFAULT_CONTROL) -> SmallRootScan:
    """Sample ``Xi`` on ``[-bound, bound]`` and index the roots near the origin.

    The four roots of smallest modulus (counted with multiplicity) become
    ``-1, -0, +0, +1`` in ascending order; further roots are numbered outward
    from there.
    """
    count = int(round(bound / step))
    grid = np.arange(-count, count + 1) * step
    # the sampling only needs signs, so it never runs finer than the default step
    coarse = replace(control, h_max=max(control.h_max, DEFAULT_CONTROL.h_max))
    vals = np.array([xi(spec, float(mu), coarse) for mu in grid])

    def f(mu):
        return xi(spec, mu, control)

    found = []  # (root, multiplicity, residual, method, iterations)
    diagnostics = []
    used = np.zeros(len(grid), dtype=bool)
    for i, v in enumerate(vals):
        if v == 0.0:
            mult = _multiplicity(f, float(grid[i]))
            found.append((float(grid[i]), mult, 0.0, 0))
            used[max(i - 1, 0):i + 2] = True
    for i in range(len(grid) - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa != 0 and fb != 0 and (fa > 0) != (fb > 0):
            a, b = grid[i], grid[i + 1]
            if coarse != control:
                fa, fb = f(a), f(b)
                if (fa > 0) == (fb > 0):  # root within solver error of a grid point
                    a, b = grid[max(i - 1, 0)], grid[min(i + 2, len(grid) - 1)]
                    fa, fb = f(a), f(b)
            lo, hi, iters = _bisect(f, a, fa, b, fb)
            root = 0.5 * (lo + hi)
            found.append((root, 1, abs(f(root)), iters))
            used[i:i + 2] = True
    # touching zeros: local minima of |Xi| without a sign change
    mag = np.abs(vals)
    for i in range(1, len(grid) - 1):
        if used[i - 1:i + 2].any():
            continue
        if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1]:
            res = minimize_scalar(lambda x: abs(f(x)), bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded", options={"xatol": 1e-10})
            if abs(f(res.x)) <= residual_tolerance(res.x):
                mult = max(2, _multiplicity(f, float(res.x)))
                found.append((float(res.x), mult, abs(f(res.x)), int(res.nfev)))
                used[i - 1:i + 2] = True

    found.sort(key=lambda r: r[0])
    expanded = [r for r in found for _ in range(r[1])]
    total = len(expanded)
    if total == 0:
        diagnostics.append("no roots found in the scan window")
        return SmallRootScan([], [], diagnostics)
    # pick the four of smallest modulus; ties go to the negative side
    order = sorted(range(total), key=lambda k: (abs(expanded[k][0]), expanded[k][0]))
    cluster = sorted(order[:4])
    if len(cluster) != 4:
        diagnostics.append(f"found {len(cluster)} roots near the origin, expected 4")
    labels = {}
    names = [SpectralIndex(-1, 1), SpectralIndex(-1, 0), SpectralIndex(1, 0), SpectralIndex(1, 1)]
    if len(cluster) == 4:
        for k, name in zip(cluster, names):
            labels[k] = name
    else:
        neg = [k for k in cluster if expanded[k][0] < 0]
        pos = [k for k in cluster if expanded[k][0] >= 0]
        for k, name in zip(reversed(neg), [SpectralIndex(-1, 0), SpectralIndex(-1, 1)]):
            labels[k] = name
        for k, name in zip(pos, [SpectralIndex(1, 0), SpectralIndex(1, 1)]):
            labels[k] = name
    lo_k, hi_k = min(cluster), max(cluster)
    for j, k in enumerate(range(lo_k - 1, -1, -1)):
        labels[k] = SpectralIndex(-1, 2 + j)
    for j, k in enumerate(range(hi_k + 1, total)):
        labels[k] = SpectralIndex(1, 2 + j)
    for root, mult, *_ in found:
        if mult > 1:
            diagnostics.append(f"root {root:.6g} has multiplicity {mult}")

    records = []
    for k in sorted(labels, key=lambda k: labels[k].sort_key()):
        root, mult, residual, iters = expanded[k]
        idx = labels[k]
        seed = mu_seed(idx)
        estimate = mu_asymptotic(spec, idx) if seed != 0 else float("nan")
        records.append(EigenvalueRecord(idx, seed, estimate, root, residual,
                                        "small-root-scan", iters + len(grid),
                                        multiplicity=mult))
    return SmallRootScan(records, [(r[0], r[1]) for r in found], diagnostics)


def _multiplicity(f, root: float, eps: float = 1e-2) -> int:
    """Order of the zero at ``root`` from the growth of ``|Xi|`` nearby."""
    a = abs(f(root + eps)) + abs(f(root - eps))
    b = abs(f(root + 2 * eps)) + abs(f(root - 2 * eps))
    if a == 0 or b == 0:
        return 1
    return max(1, int(round(math.log(b / a, 2))))


def verify_simplicity(spec: ProblemSpec, rec: EigenvalueRecord,
                      control: SolverControl = DEFAULT_CONTROL) -> float:
    """``|Xi'(mu_n)|`` by a central difference."""
    mu = rec.root
    h = 1e-6 * (1 + abs(mu))
    return abs(xi(spec, mu + h, control) - xi(spec, mu - h, control)) / (2 * h)


def simplicity_threshold(mu) -> float:
    return 1e-6 * (1 + abs(mu) ** 2)


# ---------------------------------------------------------------------------
# sweeps

def index_range(n_min: int, n_max: int) -> list[SpectralIndex]:
    """Signed indices from ``n_min`` to ``n_max``; ``-0`` is included when ``n_min < 0``."""
    out = []
    for n in range(n_min, n_max + 1):
        if n < 0:
            out.append(SpectralIndex(-1, -n))
        elif n == 0:
            if n_min < 0:
                out.append(SpectralIndex(-1, 0))
            out.append(SpectralIndex(1, 0))
        else:
            out.append(SpectralIndex(1, n))
    return out


def _find_task(args):
    spec, n, radius, control = args
    try:
        return find_eigenvalue(spec, n, radius, control)
    except NoConvergence as exc:
        seed = mu_seed(n)
        return EigenvalueRecord(n, seed, mu_asymptotic(spec, n), float("nan"), float("inf"),
                                "complex-secant", 0, notes=[str(exc)])


def compute_spectrum(spec: ProblemSpec, indices, control: SolverControl = DEFAULT_CONTROL,
                     jobs: int = 1, radius: float = 0.25, bound: float = 2.5):
    """Records for ``indices`` in index order, plus scan diagnostics."""
    indices = [SpectralIndex.of(n) for n in indices]
    small = [n for n in indices if abs(mu_seed(n)) < 2]
    large = [n for n in indices if abs(mu_seed(n)) >= 2]
    records = {}
    diagnostics = []
    if small:
        scan = scan_small_roots(spec, bound, control=control)
        diagnostics.extend(scan.diagnostics)
        by_index = {r.index: r for r in scan.records}
        for n in small:
            if n in by_index:
                records[n] = by_index[n]
            else:
                diagnostics.append(f"index {n} not resolved by the small-root scan")
    tasks = [(spec, n, radius, control) for n in large]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_find_task, tasks))
    else:
        results = [_find_task(t) for t in tasks]
    for n, rec in zip(large, results):
        records[n] = rec
        if not rec.converged:
            diagnostics.append(f"index {n} did not converge")
    ordered = [records[n] for n in sorted(records, key=SpectralIndex.sort_key)]
    diagnostics.extend(_duplicate_roots(ordered))
    return ordered, diagnostics


def _duplicate_roots(records, tol: float = 1e-8) -> list[str]:
    """Distinct indices that converged to the same nonzero root."""
    out = []
    seen = []
    for rec in records:
        if not rec.converged or rec.root == 0:
            continue
        for other in seen:
            if abs(complex(rec.root) - complex(other.root)) <= tol * (1 + abs(rec.root)):
                out.append(f"indices {other.index} and {rec.index} share the root {rec.mu:.10g}")
                break
        seen.append(rec)
    return out
