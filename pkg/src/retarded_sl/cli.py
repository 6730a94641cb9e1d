"""Command line front end.

    retarded-sl validate --config problem.json
    retarded-sl spectrum --config problem.json --n-min -5 --n-max 50 --jobs 4
    retarded-sl trace --config problem.json --n-max 20
    retarded-sl nodal --config problem.json
    retarded-sl limitfn --config problem.json
    retarded-sl reconstruct --config problem.json --u-plus-zero 11.0703463164
    retarded-sl verify-examples

Exit codes: 0 success, 1 config or IO error, 2 validation failure,
3 numerical non-convergence (or a failed reference check).
Diagnostics go to stderr as ``LEVEL code message`` lines.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .asymptotics import oscillatory_integrals
from .expr import ExprDomainError, ParseError
from .indices import SpectralIndex, mu_seed
from .integrate import PRECISE_CONTROL, SolverControl, SolverError, shoot
from .inverse import (delay_branch, estimate_limit_function, limit_function_exact,
                      reconstruct_potential)
from .nodal import find_nodes, nodal_asymptotic
from .problem import ProblemSpec, validate
from .spectrum import NoConvergence, compute_spectrum, find_eigenvalue, index_range
from .trace import trace_partial_sums, trace_rhs

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3
DIGITS = 12

_number = {"type": "number"}
_function = {"oneOf": [
    {"type": "string"},
    {"type": "number"},
    {"type": "object", "properties": {"table": {"type": "string"}},
     "required": ["table"], "additionalProperties": False},
]}
CONFIG_SCHEMA = {
    "type": "object",
    "required": ["problem"],
    "additionalProperties": False,
    "properties": {
        "problem": {
            "type": "object",
            "required": ["alpha", "beta"],
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string"},
                "theta": {"type": "array", "items": _number},
                "delta": {"type": "array", "items": _number},
                "alpha": {"type": "object", "additionalProperties": False,
                          "required": ["a1m", "a1p", "a2m", "a2p"],
                          "properties": {k: _number for k in ("a1m", "a1p", "a2m", "a2p")}},
                "beta": {"type": "object", "additionalProperties": False,
                         "required": ["b1m", "b1p", "b2m", "b2p"],
                         "properties": {k: _number for k in ("b1m", "b1p", "b2m", "b2p")}},
                "q": _function,
                "delay": _function,
            },
        },
        "solver": {"type": "object", "additionalProperties": False,
                   "properties": {"h_max": _number, "c_osc": _number,
                                  "tol_step": _number, "max_iter": {"type": "integer"}}},
        "sweep": {"type": "object", "additionalProperties": False,
                  "properties": {"n_min": {"type": "integer"}, "n_max": {"type": "integer"}}},
        "nodal": {"type": "object", "additionalProperties": False,
                  "properties": {"indices": {"type": "array", "items": {"type": "integer"}}}},
        "inverse": {"type": "object", "additionalProperties": False,
                    "properties": {"grid_points": {"type": "integer", "minimum": 3},
                                   "u_plus_zero": _number,
                                   "n": {"type": "integer", "minimum": 2}}},
        "output": {"type": "string"},
        "jobs": {"type": "integer", "minimum": 1},
    },
}

EXAMPLE_CONFIGS = {
    "example1": {
        "name": "example1",
        "theta": [1.0], "delta": [1.0],
        "alpha": {"a1m": 1.0, "a1p": 0.0, "a2m": -8.0, "a2p": -1.0},
        "beta": {"b1m": 1.0, "b1p": 0.0, "b2m": -0.1, "b2p": -1.0},
        "q": "t", "delay": "t/2",
    },
    "example2": {
        "name": "example2",
        "theta": [1.5, 2.0], "delta": [2.0, 8.0],
        "alpha": {"a1m": 2.0, "a1p": 3.0, "a2m": 4.0, "a2p": 7.0},
        "beta": {"b1m": -5.0, "b1p": 1.0, "b2m": 0.3, "b2p": 1.0},
        "q": "exp(t)", "delay": "0",
    },
}

# published reference values for the built-in examples: (example, field, mu, value, tolerance)
REFERENCE_CHECKS = [
    ("example2", "u_plus", 39.0, 11.0703463164, 1e-8),
    ("example2", "v_plus", 39.0, 0.00181958345, 1e-9),
    ("example1", "v_plus", 39.0, 0.02670511654, 1e-9),
]


class ConfigError(Exception):
    pass


class ValidationFailed(Exception):
    pass


def emit(level: str, code: str, message: str) -> None:
    print(f"{level} {code} {' '.join(str(message).split())}", file=sys.stderr)


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0.0:
        return "0"  # folds -0.0
    return f"{x:.{DIGITS}g}"


def _round_json(obj):
    if isinstance(obj, float) and obj == 0.0:
        return 0.0  # folds -0.0
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _round_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_json(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round_json(obj.item())
    return obj


def write_table(path: Path, header: list[str], rows, fmt_name: str = "csv") -> Path:
    rows = [list(row) for row in rows]
    if fmt_name == "json":
        path = path.with_suffix(".json")
        records = [dict(zip(header, _round_json(r))) for r in rows]
        path.write_text(json.dumps(records, indent=1) + "\n")
        return path
    rows = [[fmt(v) for v in row] for row in rows]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_summary(out: Path, name: str, summary: dict) -> Path:
    path = out / f"{name}_summary.json"
    path.write_text(json.dumps(_round_json(summary), indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# config

class RunConfig:
    def __init__(self, data: dict, base_dir: Path):
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config.{where}: {exc.message}") from None
        self.raw = data
        try:
            self.spec = ProblemSpec.from_dict(data["problem"], base_dir)
        except ParseError as exc:
            raise ConfigError(f"config.problem: {exc}") from None
        except (OSError, ValueError) as exc:
            raise ConfigError(f"config.problem: {exc}") from None
        solver = data.get("solver", {})
        base = PRECISE_CONTROL
        try:
            self.control = SolverControl(
                h_max=solver.get("h_max", base.h_max), c_osc=solver.get("c_osc", base.c_osc),
                tol_step=solver.get("tol_step", base.tol_step),
                max_iter=solver.get("max_iter", base.max_iter))
        except ValueError as exc:
            raise ConfigError(f"config.solver: {exc}") from None
        sweep = data.get("sweep", {})
        self.n_min = sweep.get("n_min", 0)
        self.n_max = sweep.get("n_max", 20)
        self.nodal_indices = data.get("nodal", {}).get("indices", [20, 40])
        inv = data.get("inverse", {})
        self.grid_points = inv.get("grid_points", 65)
        self.u_plus_zero = inv.get("u_plus_zero")
        self.inverse_n = inv.get("n", 200)
        self.output = data.get("output")
        self.jobs = data.get("jobs", 1)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return cls(data, path.parent)

    @classmethod
    def example(cls, name: str) -> "RunConfig":
        return cls({"problem": EXAMPLE_CONFIGS[name]}, Path("."))


def _output_dir(args, cfg: RunConfig | None) -> Path:
    out = Path(args.out or (cfg.output if cfg and cfg.output else "."))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _require_valid(spec: ProblemSpec):
    report = validate(spec)
    for w in report.warnings:
        emit("WARN", w.rule, w.message)
    if not report.passed:
        for v in report.violations:
            where = "" if v.t is None else f" (t={fmt(v.t)})"
            emit("ERROR", v.rule, v.message + where)
        raise ValidationFailed(", ".join(sorted(report.rules())))
    return report


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args, cfg: RunConfig) -> int:
    out = _output_dir(args, cfg)
    report = validate(cfg.spec)
    summary = {
        "command": "validate",
        "passed": report.passed,
        "violations": [{"rule": v.rule, "message": v.message, "t": v.t} for v in report.violations],
        "warnings": [{"rule": v.rule, "message": v.message, "t": v.t} for v in report.warnings],
    }
    write_summary(out, "validate", summary)
    for w in report.warnings:
        emit("WARN", w.rule, w.message)
    for v in report.violations:
        emit("ERROR", v.rule, v.message)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _sweep_bounds(args, cfg):
    n_min = cfg.n_min if args.n_min is None else args.n_min
    n_max = cfg.n_max if args.n_max is None else args.n_max
    if n_min > n_max:
        raise ConfigError(f"n_min={n_min} exceeds n_max={n_max}")
    return n_min, n_max


def _spectrum_rows(records):
    for r in records:
        root = complex(r.root)
        yield [r.index.sign_char, r.index.magnitude, r.seed, r.estimate,
               root.real, root.imag, r.residual, r.method, r.iterations]


SPECTRUM_HEADER = ["sign", "n", "mu_seed", "mu_estimate", "mu_re", "mu_im",
                   "residual", "method", "iters"]


def _run_spectrum(cfg, indices, jobs):
    records, diagnostics = compute_spectrum(cfg.spec, indices, cfg.control, jobs=jobs)
    for d in diagnostics:
        emit("WARN", "spectrum", d)
    return records, diagnostics


def cmd_spectrum(args, cfg: RunConfig) -> int:
    from .plotting import plot_spectrum
    _require_valid(cfg.spec)
    out = _output_dir(args, cfg)
    n_min, n_max = _sweep_bounds(args, cfg)
    records, diagnostics = _run_spectrum(cfg, index_range(n_min, n_max), _jobs(args, cfg))
    table = write_table(out / "spectrum.csv", SPECTRUM_HEADER, _spectrum_rows(records), args.format)
    plot_spectrum(records, out / "spectrum.png")
    failed = [str(r.index) for r in records if not r.converged]
    write_summary(out, "spectrum", {
        "command": "spectrum", "n_min": n_min, "n_max": n_max, "count": len(records),
        "not_converged": failed, "diagnostics": diagnostics, "table": table.name,
    })
    if failed:
        emit("ERROR", "no_convergence", f"indices {', '.join(failed)}")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_trace(args, cfg: RunConfig) -> int:
    from .plotting import plot_trace
    _require_valid(cfg.spec)
    out = _output_dir(args, cfg)
    N = cfg.n_max if args.n_max is None else args.n_max
    if N < 1:
        raise ConfigError("trace needs n_max >= 1")
    records, diagnostics = _run_spectrum(cfg, index_range(-N, N), _jobs(args, cfg))
    failed = [str(r.index) for r in records if not r.converged]
    try:
        report = trace_partial_sums(cfg.spec, records, N)
    except KeyError as exc:
        emit("ERROR", "no_convergence", exc.args[0])
        return EXIT_NUMERIC
    write_table(out / "trace.csv", ["N", "partial_sum", "rhs", "abs_gap"],
                ([k, s, report.rhs, g] for k, (s, g) in enumerate(zip(report.partial_sums, report.gaps))),
                args.format)
    write_table(out / "trace_terms.csv", ["n", "mu_sq", "mu0_sq", "correction", "term"],
                ([str(t.index), t.mu_sq, t.mu0_sq, t.correction, t.term] for t in report.terms),
                args.format)
    plot_trace(report, out / "trace.png")
    for d in report.diagnostics:
        emit("INFO", "trace", d)
    write_summary(out, "trace", {
        "command": "trace", "N": N, "rhs": report.rhs, "final": report.final,
        "abs_gap": report.gaps[-1], "small_root_contribution": report.small_root_contribution,
        "not_converged": failed, "diagnostics": diagnostics + report.diagnostics,
    })
    return EXIT_NUMERIC if failed else EXIT_OK


def _eigen(cfg, n):
    n = SpectralIndex.of(n)
    if abs(mu_seed(n)) < 2:
        raise ConfigError(f"index {n} is below the nodal range (need |n| >= 3)")
    return find_eigenvalue(cfg.spec, n, control=cfg.control)


def cmd_nodal(args, cfg: RunConfig) -> int:
    from .plotting import plot_nodal
    _require_valid(cfg.spec)
    out = _output_dir(args, cfg)
    indices = [args.n_max] if args.n_max is not None else cfg.nodal_indices
    rows, sets, approx, summary_sets = [], [], [], []
    for n in indices:
        if n < 3:
            raise ConfigError(f"nodal index {n} must be >= 3")
        rec = _eigen(cfg, n)
        ns = find_nodes(cfg.spec, rec, cfg.control)
        for d in ns.diagnostics:
            emit("WARN", "node_count", d)
        count = min(ns.count, n)
        asym = np.array([nodal_asymptotic(cfg.spec, n, j) for j in range(1, count + 1)])
        gaps = np.abs(ns.nodes[:count] - asym)
        rows += [[n, j, ns.nodes[j - 1], asym[j - 1], gaps[j - 1]] for j in range(1, count + 1)]
        sets.append(ns)
        approx.append(asym)
        summary_sets.append({"n": n, "mu": ns.mu, "count": ns.count,
                             "max_abs_gap": float(gaps.max()) if count else None,
                             "max_residual": float(ns.residuals.max()) if ns.count else None})
    write_table(out / "nodal.csv", ["n", "j", "t_numeric", "t_asymptotic", "abs_gap"], rows, args.format)
    plot_nodal(sets, approx, out / "nodal.png")
    write_summary(out, "nodal", {"command": "nodal", "sets": summary_sets})
    return EXIT_OK


def _limit_estimate(args, cfg):
    n = cfg.inverse_n if args.n_max is None else args.n_max
    rec = _eigen(cfg, n)
    ns = find_nodes(cfg.spec, rec, cfg.control)
    grid = np.linspace(0.0, math.pi, cfg.grid_points)[1:-1]
    try:
        branch = delay_branch(cfg.spec)
    except ValueError as exc:
        emit("ERROR", "mixed_delay", str(exc))
        raise ValidationFailed("mixed_delay") from None
    est = estimate_limit_function([ns], grid, branch=branch)
    for t in est.gaps:
        emit("WARN", "grid_gap", f"t={fmt(t)} lies beyond the last node")
    return est, ns


def cmd_limitfn(args, cfg: RunConfig) -> int:
    from .plotting import plot_limit_function
    _require_valid(cfg.spec)
    out = _output_dir(args, cfg)
    est, ns = _limit_estimate(args, cfg)
    exact = limit_function_exact(cfg.spec, est.grid)
    write_table(out / "limitfn.csv", ["t", "f_hat", "f_exact", "abs_gap"],
                zip(est.grid, est.f_hat, exact, np.abs(est.f_hat - exact)), args.format)
    plot_limit_function(est.grid, est.f_hat, exact, out / "limitfn.png")
    write_summary(out, "limitfn", {
        "command": "limitfn", "n": est.n, "branch": est.branch, "mu": ns.mu,
        "sup_abs_gap": float(np.max(np.abs(est.f_hat - exact))),
        "f_pi_minus_f_0": float(est.f_hat[-1] - est.f_hat[0]),
    })
    return EXIT_OK


def cmd_reconstruct(args, cfg: RunConfig) -> int:
    from .plotting import plot_reconstruction
    _require_valid(cfg.spec)
    u0 = args.u_plus_zero if args.u_plus_zero is not None else cfg.u_plus_zero
    if u0 is None:
        raise ConfigError("reconstruction needs --u-plus-zero or inverse.u_plus_zero")
    out = _output_dir(args, cfg)
    est, ns = _limit_estimate(args, cfg)
    if est.branch != "delta_zero":
        emit("ERROR", "delay_nonzero", "reconstruction needs a vanishing delay")
        raise ValidationFailed("delay_nonzero")
    res = reconstruct_potential(est, u0)
    q_true = cfg.spec.q.sample(res.grid)
    write_table(out / "reconstruction.csv", ["t", "f_hat", "q_hat", "q_true"],
                zip(res.grid, est.f_hat, res.q_hat, q_true), args.format)
    plot_reconstruction(res.grid, res.q_hat, q_true, out / "reconstruction.png")
    inner = (res.grid >= 0.1 * math.pi) & (res.grid <= 0.9 * math.pi)
    rel = np.abs(res.q_hat[inner] - q_true[inner]) / np.maximum(np.abs(q_true[inner]), 1e-300)
    write_summary(out, "reconstruct", {
        "command": "reconstruct", "n": est.n, "u_plus_zero": u0, "stencil": res.stencil,
        "f_zero": res.f_zero, "f_pi": res.f_pi,
        "relative_sup_error_inner": float(rel.max()) if rel.size else None,
    })
    return EXIT_OK


def _closed_form_u_plus_example1(mu: float) -> float:
    """``1/2 int_0^pi t cos(mu t / 2) dt`` from the antiderivative."""
    if mu == 0:
        return math.pi ** 2 / 4
    a = mu / 2
    return 0.5 * (math.pi * math.sin(a * math.pi) / a + (math.cos(a * math.pi) - 1) / a ** 2)


def cmd_verify_examples(args, cfg=None) -> int:
    out = _output_dir(args, None)
    specs = {name: RunConfig.example(name).spec for name in EXAMPLE_CONFIGS}
    checks = []
    for name, field, mu, expected, tol in REFERENCE_CHECKS:
        value = getattr(oscillatory_integrals(specs[name], mu), field)
        ok = abs(value - expected) <= tol
        checks.append({"example": name, "quantity": f"{field}({fmt(mu)})", "reference": expected,
                       "computed": value, "tolerance": tol, "passed": ok})
        emit("INFO" if ok else "ERROR", "reference_check",
             f"{name} {field}({fmt(mu)}) = {fmt(value)} vs {fmt(expected)}")

    e1, e2 = specs["example1"], specs["example2"]
    u39 = oscillatory_integrals(e1, 39.0).u_plus
    u0 = oscillatory_integrals(e1, 0.0).u_plus
    mu40 = {}
    for name in ("example1", "example2"):
        try:
            mu40[name] = find_eigenvalue(specs[name], 40, control=PRECISE_CONTROL)
        except NoConvergence as exc:
            emit("ERROR", "no_convergence", str(exc))
            return EXIT_NUMERIC
    discrepancies = [
        {"example": "example1", "quantity": "u_plus(39)", "reference": 0.00065746219,
         "computed": u39, "oracle": _closed_form_u_plus_example1(39.0)},
        {"example": "example1", "quantity": "u_plus(0)", "reference": 4.93480220054,
         "computed": u0, "oracle": math.pi ** 2 / 4},
        {"example": "example1", "quantity": "mu(+40)", "reference": 38.9997766723,
         "computed": mu40["example1"].mu, "oracle": mu40["example1"].estimate},
        {"example": "example1", "quantity": "trace", "reference": 58.3910062461,
         "computed": trace_rhs(e1), "oracle": 38.1161346},
        {"example": "example2", "quantity": "trace", "reference": -569.751286593,
         "computed": trace_rhs(e2), "oracle": -569.7555},
        {"example": "example2", "quantity": "mu(+40)", "reference": 37.9930198832,
         "computed": mu40["example2"].mu, "oracle": mu40["example2"].estimate},
    ]
    for d in discrepancies:
        emit("INFO", "reference_discrepancy",
             f"{d['example']} {d['quantity']}: reference {fmt(d['reference'])}, computed {fmt(d['computed'])}")
    passed = all(c["passed"] for c in checks)
    write_table(out / "examples_uv.csv", ["mu", "u_plus", "u_minus", "v_plus", "v_minus"],
                ([mu, *oscillatory_integrals(spec, mu).as_tuple()]
                 for spec in (e1, e2) for mu in (0.0, 39.0)), args.format)
    write_summary(out, "verify_examples", {
        "command": "verify-examples", "passed": passed, "checks": checks,
        "discrepancies": discrepancies,
    })
    print(json.dumps(_round_json({"passed": passed, "checks": checks,
                                  "discrepancies": discrepancies}), indent=2))
    return EXIT_OK if passed else EXIT_NUMERIC


def cmd_trajectory(args, cfg: RunConfig) -> int:
    _require_valid(cfg.spec)
    out = _output_dir(args, cfg)
    mu = complex(args.mu) if "j" in args.mu else float(args.mu)
    sol = shoot(cfg.spec, mu, cfg.control)
    ts = np.linspace(0.0, math.pi, args.points)
    y, yp = sol.sample(ts)
    y, yp = np.asarray(y, dtype=complex), np.asarray(yp, dtype=complex)
    write_table(out / "trajectory.csv", ["t", "y_re", "y_im", "yp_re", "yp_im"],
                zip(ts, y.real, y.imag, yp.real, yp.imag), args.format)
    return EXIT_OK


def cmd_integrals(args, cfg: RunConfig) -> int:
    out = _output_dir(args, cfg)
    mus = np.linspace(args.mu_min, args.mu_max, args.points)
    write_table(out / "integrals.csv", ["mu", "u_plus", "u_minus", "v_plus", "v_minus"],
                ([mu, *oscillatory_integrals(cfg.spec, mu).as_tuple()] for mu in mus), args.format)
    return EXIT_OK


def _jobs(args, cfg):
    return args.jobs if args.jobs is not None else cfg.jobs


COMMANDS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "trace": cmd_trace,
    "nodal": cmd_nodal,
    "limitfn": cmd_limitfn,
    "reconstruct": cmd_reconstruct,
    "verify-examples": cmd_verify_examples,
    "trajectory": cmd_trajectory,
    "integrals": cmd_integrals,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="retarded-sl",
                                     description="Spectral and inverse nodal computations "
                                                 "for Sturm-Liouville problems with a retarded argument.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, config=True):
        p = sub.add_parser(name, help=help_text)
        if config:
            p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output directory (default: config output or .)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--jobs", type=int, help="worker processes for index sweeps")
        p.add_argument("--n-min", type=int)
        p.add_argument("--n-max", type=int)
        p.add_argument("--u-plus-zero", type=float)
        return p

    add("validate", "check a problem configuration")
    add("spectrum", "eigenvalues for a signed index range")
    add("trace", "regularized trace partial sums")
    add("nodal", "eigenfunction zeros against the asymptotic formulas")
    add("limitfn", "limit function estimated from nodal data")
    add("reconstruct", "potential recovered from nodal data (zero delay)")
    add("verify-examples", "reference values of the two built-in examples", config=False)
    p = add("trajectory", "dump phi(t, mu) on a uniform grid")
    p.add_argument("--mu", required=True, help="real or complex, e.g. 3.5 or 3+0.1j")
    p.add_argument("--points", type=int, default=1001)
    p = add("integrals", "tabulate U+/-, V+/- over a range of mu")
    p.add_argument("--mu-min", type=float, default=0.0)
    p.add_argument("--mu-max", type=float, default=40.0)
    p.add_argument("--points", type=int, default=81)
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.jobs is not None and args.jobs < 1:
        emit("ERROR", "config", "--jobs must be >= 1")
        return EXIT_CONFIG
    try:
        cfg = None if args.command == "verify-examples" else RunConfig.load(args.config)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        emit("ERROR", "config", str(exc))
        return EXIT_CONFIG
    except ValidationFailed as exc:
        emit("ERROR", "validation", f"failed rules: {exc}")
        return EXIT_VALIDATION
    except (NoConvergence, SolverError) as exc:
        emit("ERROR", "no_convergence", str(exc))
        return EXIT_NUMERIC
    except (ExprDomainError, ValueError) as exc:
        emit("ERROR", "domain", str(exc))
        return EXIT_VALIDATION
    except OSError as exc:
        emit("ERROR", "io", f"{exc.filename}: {exc.strerror}")
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
