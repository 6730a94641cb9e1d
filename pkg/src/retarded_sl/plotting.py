"""Static figures written next to the CSV reports (Agg backend, PNG)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_spectrum", "plot_trace", "plot_nodal", "plot_limit_function",
           "plot_reconstruction"]

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 8,
    "savefig.bbox": "tight",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_spectrum(records, path):
    """Roots against index, and the scaled deviation from the estimate."""
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
        n = np.array([r.index.value for r in records])
        mu = np.array([r.mu for r in records])
        ax1.plot(n, mu, "o", ms=3, label=r"$\mu_n$")
        seeds = np.array([r.seed for r in records])
        ax1.plot(n, seeds, "-", lw=0.8, label=r"$\mu_n^0$")
        ax1.set_xlabel("n")
        ax1.set_ylabel(r"$\mu$")
        ax1.legend()
        est = np.array([r.estimate for r in records])
        ok = np.isfinite(est) & np.isfinite(mu)
        ax2.semilogy(n[ok], n[ok] ** 2 * np.abs(mu[ok] - est[ok]) + 1e-300, ".")
        ax2.set_xlabel("n")
        ax2.set_ylabel(r"$n^2\,|\mu_n - \mathrm{estimate}|$")
        return _save(fig, path)


def plot_trace(report, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(range(len(report.partial_sums)), report.partial_sums, ".-", label=r"$S_N$")
        ax.axhline(report.rhs, color="k", lw=0.8, ls="--", label="closed form")
        ax.set_xlabel("N")
        ax.set_ylabel("partial sum")
        ax.legend()
        return _save(fig, path)


def plot_nodal(sets, asymptotic, path):
    """Deviation of numeric nodes from the asymptotic positions, per index."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for ns, approx in zip(sets, asymptotic):
            k = min(len(ns.nodes), len(approx))
            ax.semilogy(ns.nodes[:k], np.abs(ns.nodes[:k] - approx[:k]) + 1e-300, ".",
                        ms=3, label=f"n={ns.index}")
        ax.set_xlim(0, math.pi)
        ax.set_xlabel("t")
        ax.set_ylabel("|numeric - asymptotic|")
        ax.legend()
        return _save(fig, path)


def plot_limit_function(grid, f_hat, f_exact, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(grid, f_hat, ".", ms=3, label=r"$\hat f$")
        if f_exact is not None:
            ax.plot(grid, f_exact, "-", lw=1, label="closed form")
        ax.set_xlim(0, math.pi)
        ax.set_xlabel("t")
        ax.set_ylabel("f(t)")
        ax.legend()
        return _save(fig, path)


def plot_reconstruction(grid, q_hat, q_true, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(grid, q_hat, ".", ms=3, label=r"$\hat q$")
        if q_true is not None:
            ax.plot(grid, q_true, "-", lw=1, label="q")
        ax.set_xlim(0, math.pi)
        ax.set_xlabel("t")
        ax.set_ylabel("q(t)")
        ax.legend()
        return _save(fig, path)
