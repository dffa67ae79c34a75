"""Command-line front end: verification suites with JSON/CSV reports.

Exit codes: 0 all cases pass, 1 a numerical check failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import extension, flat, sphere, yamabe
from .errors import FracDiracError, ParameterError
from .specfun import d_lambda

SCHEMA = "fracdirac.report/1"
COMMANDS = ("verify-multiplier", "bubble", "energy", "q-operator", "optimize")


@dataclass
class RunConfig:
    command: str
    n: int = 2
    lam: float = 0.3
    L: float = 40.0
    m: int = 256
    M: int = 4096
    T_max: float | None = None
    grade: float = 3.0
    modes_file: str | None = None
    out: str | None = None
    json: bool = False
    seed: int = 0
    taper: float = 0.5
    iterations: int = 50


@dataclass
class Report:
    config: RunConfig
    cases: list = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, name, inputs, computed, oracle, tol, rel_err=None, passed=None):
        if rel_err is None and oracle is not None and computed is not None:
            rel_err = abs(computed - oracle) / abs(oracle) if oracle != 0 else abs(computed)
        if passed is None:
            passed = rel_err is not None and rel_err <= tol
        self.cases.append({"case": len(self.cases), "name": name, "inputs": inputs, "computed": computed,
                           "oracle": oracle, "rel_err": rel_err, "tol": tol, "pass": bool(passed)})

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.cases)

    def to_dict(self) -> dict:
        errs = [c["rel_err"] for c in self.cases if c["rel_err"] is not None]
        return {
            "schema": SCHEMA,
            "config": asdict(self.config),
            "cases": self.cases,
            "summary": {"cases": len(self.cases), "passed": sum(c["pass"] for c in self.cases),
                        "failed": sum(not c["pass"] for c in self.cases),
                        "max_rel_err": max(errs) if errs else None},
            "wall_time_s": self.wall_time,
        }


# --- serialization ---------------------------------------------------------------

def _dump(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_dump(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    s = str(obj).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def report_json(report: Report) -> str:
    return _dump(report.to_dict()) + "\n"


def write_report_csv(path, report: Report) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["case", "name", "inputs", "computed", "oracle", "rel_err", "tol", "pass"])
        for c in report.cases:
            inputs = ";".join(f"{k}={v}" for k, v in c["inputs"].items())
            w.writerow([c["case"], c["name"], inputs] +
                       [_dump(c[k]) for k in ("computed", "oracle", "rel_err", "tol")] + [int(c["pass"])])


# --- commands --------------------------------------------------------------------

def _check_order(lam):
    if not (np.isfinite(lam) and lam > 0):
        raise ParameterError(f"lambda={lam} must be positive")
    d_lambda(lam)  # raises a PoleError naming lambda at 1/2 + integer


def _mode_problems(cfg):
    if cfg.modes_file:
        return extension.read_modes_csv(cfg.modes_file, M=cfg.M, T_max=cfg.T_max, grade=cfg.grade)
    return [extension.ModeProblem(cfg.n, cfg.lam, xi, s, M=cfg.M, T_max=cfg.T_max, grade=cfg.grade)
            for xi in (0.5, 1.0, 2.0) for s in (1, -1)]


def cmd_verify_multiplier(cfg: RunConfig) -> Report:
    _check_order(cfg.lam)
    rep = Report(cfg)
    if cfg.lam < 0.5:
        for k in range(1, 6):
            for s in (1, -1):
                val = sphere.scattering_from_profile(cfg.n, k, cfg.lam, s)
                rep.add("sphere_profile", {"n": cfg.n, "lambda": cfg.lam, "k": k, "s": s}, val,
                        sphere.sphere_multiplier(cfg.lam, sphere.mu(cfg.n, k), s), 1e-6)
    for p in _mode_problems(cfg):
        sol = extension.solve_mode_ode(p)
        val = extension.dtn_extract(sol, p.lam)
        rep.add("flat_dtn", {"n": p.n, "lambda": p.lam, "xi": p.xi, "s": p.s}, val, p.target,
                1e-4 if p.lam < 0.5 else 1e-3)
    return rep


def cmd_bubble(cfg: RunConfig) -> Report:
    _check_order(cfg.lam)
    rep = Report(cfg)
    rc = flat.build_clifford(cfg.n)
    phi0 = np.zeros(rc.N, dtype=complex)
    phi0[0] = 1 / math.sqrt(2)
    lam1 = flat.first_eigenvalue_sphere(cfg.n, cfg.lam)
    residuals = []
    for L in (cfg.L / 2, cfg.L, 2 * cfg.L):
        grid = flat.TorusGrid(cfg.n, L, cfg.m)
        b = flat.bubble(grid, cfg.lam, phi0, taper=cfg.taper)
        res = flat.yamabe_residual(b, cfg.lam, lam1)
        residuals.append(res)
        rep.add("bubble_residual", {"L": L, "m": cfg.m, "taper": cfg.taper}, res, None, 5e-2,
                rel_err=res, passed=res <= 5e-2 if L == cfg.L else True)
    rep.add("residual_decreasing_in_L", {"L": [cfg.L / 2, cfg.L, 2 * cfg.L]}, None, None, 0.0,
            passed=residuals[0] > residuals[1] > residuals[2])
    grid = flat.TorusGrid(cfg.n, cfg.L, cfg.m)
    b = flat.bubble(grid, cfg.lam, phi0, taper=cfg.taper)
    zero = flat.yamabe_residual(b, cfg.lam, 0.0)
    rep.add("mu_zero_control", {"mu": 0.0}, zero, 1.0, 1e-12)
    rnd = flat.random_field(grid, np.random.default_rng(cfg.seed))
    control = flat.yamabe_residual(rnd, cfg.lam, lam1)
    rep.add("random_control", {"seed": cfg.seed}, control, None, 0.3, passed=control > 0.3)
    return rep


def cmd_energy(cfg: RunConfig) -> Report:
    _check_order(cfg.lam)
    if not cfg.lam < 0.5:
        raise ParameterError(f"energy identity is checked for lambda < 1/2, got {cfg.lam}")
    rep = Report(cfg)
    rng = np.random.default_rng(cfg.seed)
    for p in _mode_problems(cfg):
        sol = extension.solve_mode_ode(p)
        lhs, rhs = extension.mode_energy(p, sol, p.lam)
        inputs = {"lambda": p.lam, "xi": p.xi, "s": p.s, "M": p.M}
        rep.add("energy_identity", inputs, lhs, rhs, 1e-3)
        gaps, orders = extension.energy_convergence(p, sol, (p.M // 4, p.M // 2, p.M))
        rep.add("energy_order", inputs, orders[-1], None, 1.0, passed=orders[-1] >= 1.0)
        zero = extension.sobolev_gap(p, lambda t: (np.zeros_like(t), np.zeros_like(t)), p.lam, sol)
        rep.add("sobolev_zero", inputs, zero, None, 1e-3, rel_err=abs(zero) / abs(rhs),
                passed=abs(zero) <= 1e-3 * abs(rhs))
        worst = min(extension.sobolev_gap(p, bump, p.lam, sol)
                    for bump in extension.random_bumps(rng, 20, p.xi))
        rep.add("sobolev_min_gap", inputs, worst, None, 1e-3 * abs(rhs), passed=worst >= -1e-3 * abs(rhs))
    return rep


def cmd_q_operator(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    n, eps = cfg.n, 1e-5
    for k in range(1, 21):
        m = sphere.mu(n, k)
        for s in (1, -1):
            fd = -s * (sphere.gamma_multiplier(n / 2 + eps, m) - sphere.gamma_multiplier(n / 2 - eps, m)) / (2 * eps)
            rep.add("q_multiplier", {"n": n, "k": k, "s": s}, sphere.q_multiplier(n, m, s), fd, 1e-6)
    return rep


def cmd_optimize(cfg: RunConfig) -> Report:
    _check_order(cfg.lam)
    rep = Report(cfg)
    grid = flat.TorusGrid(cfg.n, cfg.L, cfg.m)
    start = flat.random_field(grid, np.random.default_rng(cfg.seed))
    state = yamabe.minimize(start, cfg.lam, max_iters=cfg.iterations, tol=1e-8)
    trace = np.array(state.trace)
    rep.add("monotone_descent", {"iterations": state.iterations}, float(np.max(np.diff(trace), initial=0.0)),
            None, 0.0, passed=bool(np.all(np.diff(trace) <= 0)))
    rep.add("positive_J", {"seed": cfg.seed}, state.value, None, 0.0, passed=state.value > 0)
    rep.add("el_residual_random_run", {"iterations": state.iterations}, yamabe.el_residual(state), None,
            math.inf, passed=True)
    rc = flat.build_clifford(cfg.n)
    phi0 = np.zeros(rc.N, dtype=complex)
    phi0[0] = 1 / math.sqrt(2)
    bub = flat.bubble(grid, cfg.lam, phi0, taper=cfg.taper)
    b_state = yamabe.minimize(flat.geometric_fractional_dirac(bub, cfg.lam), cfg.lam,
                              max_iters=cfg.iterations, tol=0.0)
    drop = (b_state.trace[0] - b_state.trace[-1]) / b_state.trace[0]
    rep.add("bubble_start_stationarity", {"iterations": b_state.iterations, "taper": cfg.taper}, drop,
            None, 1e-4, rel_err=drop, passed=drop < 1e-4)
    return rep


HANDLERS = {
    "verify-multiplier": cmd_verify_multiplier,
    "bubble": cmd_bubble,
    "energy": cmd_energy,
    "q-operator": cmd_q_operator,
    "optimize": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracdirac", description=__doc__.splitlines()[0])
    ap.add_argument("--cmd", required=True, choices=COMMANDS)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.3)
    ap.add_argument("--L", type=float, default=40.0)
    ap.add_argument("--m", type=int, default=256)
    ap.add_argument("--M", type=int, default=4096, help="graded-grid points for mode problems")
    ap.add_argument("--Tmax", dest="T_max", type=float, default=None)
    ap.add_argument("--grade", type=float, default=3.0)
    ap.add_argument("--modes-file", dest="modes_file", default=None, help="CSV with header n,lambda,xi,s")
    ap.add_argument("--out", default=None, help="report path; a .csv twin is written next to it")
    ap.add_argument("--json", action="store_true", help="emit the JSON report")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--taper", type=float, default=0.5)
    ap.add_argument("--iterations", type=int, default=50)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.cmd, **{k: v for k, v in vars(args).items() if k != "cmd"})
    t0 = time.perf_counter()
    try:
        report = HANDLERS[cfg.command](cfg)
    except ParameterError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FracDiracError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    report.wall_time = time.perf_counter() - t0
    text = report_json(report)
    if cfg.out:
        out = Path(cfg.out)
        if cfg.json:
            out.write_text(text)
            write_report_csv(out.with_suffix(".csv"), report)
        else:
            write_report_csv(out, report)
    elif cfg.json:
        sys.stdout.write(text)
    summary = report.to_dict()["summary"]
    status = "PASS" if report.ok else "FAIL"
    print(f"{cfg.command}: {status} ({summary['passed']}/{summary['cases']} cases)", file=sys.stderr)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
