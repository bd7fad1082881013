"""Command-line front end.

One JSON config file describes a run; the CLI dispatches to the
solvers and writes plot-ready CSV tables plus a JSON metadata echo.
Outputs are deterministic: identical config and build give
byte-identical CSV bodies (only the metadata timestamp varies).

Exit codes: 0 ok, 2 config error, 3 solver failure, 4 accuracy
failure, 5 I/O failure.  Failures print a JSON error object to
standard error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field as dataclass_field
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy

from . import __version__
from .carleman import AccuracyError, t0, tau
from .contact import (ContactError, IndentorShape, PhysicalParams,
                      SolverOptions, reduce_physical, solve_convex,
                      solve_flat)
from .grids import QuadGrid
from .homogenize import (HomogReport, effective_coefficient, homogenize_convex,
                         homogenize_flat, oscillate)
from .profiles import FrictionProfile, ProfileError


class ConfigError(ValueError):
    """Config file missing, malformed, or schema-violating."""


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_ACCURACY = 4
EXIT_IO = 5

COMMANDS = ("flat-punch", "contact", "homogenize", "selftest")


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

_SAFE_FUNCS = {name: getattr(np, name) for name in
               ("sin", "cos", "tan", "arctan", "exp", "log", "sqrt",
                "abs", "cosh", "sinh", "tanh", "clip", "where",
                "minimum", "maximum")}
_SAFE_FUNCS["pi"] = np.pi


def _expr_callable(expr: str):
    code = compile(expr, "<config expr>", "eval")
    for name in code.co_names:
        if name not in _SAFE_FUNCS and name != "x":
            raise ConfigError(f"unknown name {name!r} in expression {expr!r}")

    def fn(x):
        return eval(code, {"__builtins__": {}}, dict(_SAFE_FUNCS, x=x))

    return fn


def _profile_from_config(spec: Dict) -> FrictionProfile:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("friction spec needs a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "constant":
            return FrictionProfile.constant(float(spec["value"]))
        if kind == "steps":
            return FrictionProfile.from_steps(
                [float(b) for b in spec["breakpoints"]],
                [float(v) for v in spec["values"]])
        if kind == "polynomial":
            return FrictionProfile.polynomial(
                [float(c) for c in spec["coeffs"]])
        if kind == "expression":
            fn = _expr_callable(spec["expr"])
            return FrictionProfile.from_callable(
                fn, float(spec["lipschitz_bound"]),
                [float(b) for b in spec.get("breakpoints", (-1.0, 1.0))])
    except (KeyError, TypeError, ProfileError) as exc:
        raise ConfigError(f"bad friction spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown friction kind {kind!r}")


def _shape_from_config(spec: Optional[Dict]) -> IndentorShape:
    if spec is None:
        return IndentorShape.flat()
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("indentor spec needs a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "flat":
            return IndentorShape.flat()
        if kind == "parabola":
            return IndentorShape.parabola(float(spec["radius"]))
        if kind == "polynomial":
            coeffs = np.asarray([float(c) for c in spec["coeffs"]])
            der = np.polynomial.polynomial.polyder(coeffs)
            return IndentorShape.from_callables(
                lambda x: np.polynomial.polynomial.polyval(x, coeffs),
                lambda x: np.polynomial.polynomial.polyval(x, der))
        if kind == "expression":
            fn = _expr_callable(spec["expr"])
            fp = _expr_callable(spec["slope_expr"])
            return IndentorShape.from_callables(fn, fp)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad indentor spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown indentor kind {kind!r}")


@dataclass
class RunConfig:
    command: str
    P: float
    f: FrictionProfile
    g: IndentorShape
    grid_n: int = 2048
    grid_kind: str = "chebyshev_gauss"
    solver: SolverOptions = dataclass_field(default_factory=SolverOptions)
    n_list: Tuple[int, ...] = (1, 2, 4, 8, 16, 32)
    out_dir: str = "out"
    raw: Dict = dataclass_field(default_factory=dict)


def load_config(path: Optional[str], command: Optional[str],
                overrides: Dict) -> RunConfig:
    raw: Dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}"
                              ) from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    cmd = command or raw.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {cmd!r}")

    if "physical" in raw and "reduced" in raw:
        raise ConfigError("give exactly one of 'physical' or 'reduced'")
    physical_echo = None
    if "physical" in raw:
        blk = raw["physical"]
        try:
            params = PhysicalParams(nu=float(blk["nu"]), P=float(blk["P"]),
                                    fbar=_profile_from_config(blk["fbar"]),
                                    gbar=_shape_from_config(blk.get("gbar")))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad physical block: {exc}") from exc
        P, f, g = reduce_physical(params)
        physical_echo = {"nu": params.nu, "P": params.P}
    elif "reduced" in raw:
        blk = raw["reduced"]
        try:
            P = float(blk["P"])
            f = _profile_from_config(blk["f"])
            g = _shape_from_config(blk.get("g"))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad reduced block: {exc}") from exc
    elif cmd == "selftest":
        P, f, g = 1.0, FrictionProfile.constant(0.3), IndentorShape.flat()
    else:
        raise ConfigError("config needs a 'physical' or 'reduced' block")

    grid = raw.get("grid", {})
    grid_n = int(overrides.get("grid_n") or grid.get("n", 2048))
    grid_kind = grid.get("kind", "chebyshev_gauss")
    if grid_kind != "chebyshev_gauss":
        raise ConfigError(f"unknown grid kind {grid_kind!r}")
    if grid_n < 8:
        raise ConfigError("grid n must be at least 8")

    solver = SolverOptions(grid_n=grid_n)
    for key, val in raw.get("solver", {}).items():
        if not hasattr(solver, key):
            raise ConfigError(f"unknown solver option {key!r}")
        if key == "method":
            solver.method = str(val)
        elif key in ("max_iter", "grid_n"):
            setattr(solver, key, int(val))
        elif key == "step":
            solver.step = None if val is None else float(val)
        else:
            setattr(solver, key, float(val))
    solver.grid_n = grid_n

    n_list = tuple(int(n) for n in
                   raw.get("homogenize", {}).get("n_list", (1, 2, 4, 8, 16, 32)))
    out_dir = overrides.get("out") or raw.get("output", {}).get("dir", "out")

    cfg = RunConfig(command=cmd, P=P, f=f, g=g, grid_n=grid_n,
                    grid_kind=grid_kind, solver=solver, n_list=n_list,
                    out_dir=out_dir, raw=raw)
    cfg.raw.setdefault("_echo", {})
    cfg.raw["_echo"] = {
        "command": cmd, "grid": {"n": grid_n, "kind": grid_kind},
        "solver": asdict(solver), "P": P,
        "n_list": list(n_list), "output": {"dir": out_dir},
        "physical": physical_echo,
    }
    return cfg


# ---------------------------------------------------------------------------
# Result bundle
# ---------------------------------------------------------------------------

@dataclass
class ResultBundle:
    metadata: Dict
    fields: Dict[str, Dict[str, np.ndarray]]   # table name -> columns
    scalars: Dict[str, float]


def _versions() -> Dict[str, str]:
    return {"halfcontact": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": ".".join(map(str, sys.version_info[:3]))}


def run(cfg: RunConfig) -> ResultBundle:
    """Dispatch a validated config to the solvers."""
    start = time.perf_counter()
    grid = QuadGrid.chebyshev(cfg.grid_n)
    fields: Dict[str, Dict[str, np.ndarray]] = {}
    scalars: Dict[str, float] = {}

    if cfg.command == "flat-punch":
        sol = solve_flat(cfg.P, cfg.f, grid=grid)
        _fill_solution(fields, scalars, sol, cfg, grid)
    elif cfg.command == "contact":
        sol = solve_convex(cfg.P, cfg.f, cfg.g, cfg.solver, grid=grid)
        _fill_solution(fields, scalars, sol, cfg, grid)
    elif cfg.command == "homogenize":
        report = _run_homogenize(cfg)
        _fill_homog(fields, scalars, report)
    elif cfg.command == "selftest":
        table, ok = selftest()
        fields["selftest"] = table
        scalars["selftest_failures"] = float(
            np.sum(table["status"] == "fail"))
        if not ok:
            raise AccuracyError("selftest failed", scalars["selftest_failures"])
    else:                                    # pragma: no cover
        raise ConfigError(f"unknown command {cfg.command!r}")

    metadata = {"config": cfg.raw.get("_echo", {}),
                "versions": _versions(),
                "timings": {"total_s": time.perf_counter() - start},
                "timestamp": datetime.datetime.now(
                    datetime.timezone.utc).isoformat()}
    return ResultBundle(metadata=metadata, fields=fields, scalars=scalars)


def _fill_solution(fields, scalars, sol, cfg: RunConfig,
                   grid: QuadGrid) -> None:
    x = grid.nodes
    t = sol.pressure
    fields["pressure"] = {
        "x": x, "t": t, "u": sol.u.values, "g": cfg.g(x),
        "t0": sol.t0_values, "f": cfg.f(x),
    }
    # table-reproducible quadratures (the CSV round-trip identity);
    # the *_refined variants use singularity-aware weights
    scalars["total_normal"] = float(np.dot(grid.plain_weights, t))
    scalars["total_tangential"] = -float(
        np.dot(grid.plain_weights, cfg.f(x) * t))
    from .carleman import t0_weighted_integral
    t0_mass = float(t0_weighted_integral(cfg.f))
    ft0_mass = float(t0_weighted_integral(cfg.f, extra=cfg.f))
    if "rho" in sol.meta:
        mn, rho = sol.meta["node_masses"], sol.meta["rho"]
        scalars["total_normal_refined"] = float(
            np.dot(mn, rho)) - cfg.P * t0_mass
        scalars["total_tangential_refined"] = -float(
            np.dot(mn, rho * cfg.f(x))) + cfg.P * ft0_mass
    else:
        scalars["total_normal_refined"] = -cfg.P * t0_mass
        scalars["total_tangential_refined"] = cfg.P * ft0_mass
    a, b = sol.contact_interval
    scalars["contact_a"], scalars["contact_b"] = a, b
    for key, val in sol.residuals.items():
        scalars["residual_" + key] = float(val)


def _run_homogenize(cfg: RunConfig) -> HomogReport:
    if cfg.g.lipschitz_bound == 0.0:
        return homogenize_flat(cfg.P, cfg.f, cfg.n_list)
    return homogenize_convex(cfg.P, cfg.g, cfg.f, cfg.n_list, cfg.solver)


def _fill_homog(fields, scalars, report: HomogReport) -> None:
    cols: Dict[str, np.ndarray] = {
        "n": np.asarray(report.n_values, dtype=float),
        "force_error": np.asarray(report.force_errors),
    }
    for name, gaps in report.weak_gaps.items():
        safe = name.replace(" ", "").replace("(", "").replace(")", "")
        cols["gap_" + safe] = np.asarray(gaps)
    if report.intervals is not None:
        cols["a"] = np.asarray([ab[0] for ab in report.intervals])
        cols["b"] = np.asarray([ab[1] for ab in report.intervals])
    fields["homogenize"] = cols
    scalars["f_eff"] = report.f_eff
    if "interval_eff" in report.notes:
        scalars["a_eff"], scalars["b_eff"] = report.notes["interval_eff"]
    scalars["n_failures"] = float(len(report.notes.get("failures", ())))


# ---------------------------------------------------------------------------
# Selftest: quick invariant sweep over all modules
# ---------------------------------------------------------------------------

def selftest() -> Tuple[Dict[str, np.ndarray], bool]:
    checks: List[Tuple[str, float, float]] = []   # name, value, tolerance
    grid = QuadGrid.chebyshev(512)

    f = FrictionProfile.constant(0.3)
    t0f = t0(f, grid, check_mass=False)
    alpha = np.arctan(0.3) / np.pi
    exact = np.exp(-alpha * np.log((1 + grid.nodes) / (1 - grid.nodes))) / (
        np.pi * np.sqrt(1 - grid.nodes ** 2) * np.sqrt(1.09))
    checks.append(("t0_constant_closed_form",
                   float(np.max(np.abs(t0f.values / exact - 1.0))), 1e-10))

    from .carleman import t0_weighted_integral
    checks.append(("t0_unit_mass",
                   abs(float(t0_weighted_integral(f)) - 1.0), 1e-8))

    fj = FrictionProfile.from_steps([-1.0, 0.2, 1.0], [0.2, 0.8])
    checks.append(("t0_jump_unit_mass",
                   abs(float(t0_weighted_integral(fj)) - 1.0), 1e-6))

    sol = solve_convex(1.0, f, IndentorShape.parabola(2.0),
                       SolverOptions(grid_n=512))
    checks.append(("contact_mass", sol.residuals["mass"], 1e-8))
    checks.append(("contact_complementarity",
                   sol.residuals["complementarity"], 1e-6))
    checks.append(("contact_kkt", sol.residuals["kkt_max"], 1e-6))

    p = FrictionProfile.from_steps([-1.0, 0.0, 1.0], [0.0, 1.0])
    checks.append(("f_eff_two_valued",
                   abs(effective_coefficient(p) - np.tan(np.pi / 8)), 1e-12))
    f4 = oscillate(p, 4)
    checks.append(("oscillate_sup_norm", abs(f4.sup_norm - p.sup_norm), 0.0))

    names = np.asarray([c[0] for c in checks])
    values = np.asarray([c[1] for c in checks])
    tols = np.asarray([c[2] for c in checks])
    status = np.where(values <= tols, "pass", "fail")
    table = {"check": names, "value": values, "tolerance": tols,
             "status": status}
    for nm, val, tol, st in zip(names, values, tols, status):
        print(f"{st:4s}  {nm:28s} {val:.3e} (tol {tol:.1e})")
    return table, bool(np.all(status == "pass"))


# ---------------------------------------------------------------------------
# CSV / JSON emission
# ---------------------------------------------------------------------------

def _format_cell(v) -> str:
    if isinstance(v, (str, np.str_)):
        return str(v)
    return f"{float(v):.17g}"


def emit_csv(bundle: ResultBundle, out_dir) -> List[str]:
    """Write one CSV per table, scalars.csv, metadata.json, and a
    gnuplot stub.  Returns the written paths."""
    import os
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, cols in bundle.fields.items():
        path = os.path.join(out_dir, f"{name}.csv")
        keys = list(cols)
        rows = zip(*(cols[k] for k in keys))
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL,
                           lineterminator="\r\n")
            w.writerow(keys)
            for row in rows:
                w.writerow([_format_cell(v) for v in row])
        written.append(path)
    path = os.path.join(out_dir, "scalars.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(["name", "value"])
        for key in sorted(bundle.scalars):
            w.writerow([key, _format_cell(bundle.scalars[key])])
    written.append(path)
    path = os.path.join(out_dir, "metadata.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(path)
    if "pressure" in bundle.fields:
        path = os.path.join(out_dir, "plot.gp")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("set datafile separator ','\n"
                     "set key autotitle columnhead\n"
                     "plot 'pressure.csv' using 1:2 with lines title 't', \\\n"
                     "     'pressure.csv' using 1:3 with lines title 'u'\n")
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _fail(exit_code: int, kind: str, message: str) -> int:
    json.dump({"error": {"type": kind, "message": message,
                         "exit_code": exit_code}}, sys.stderr)
    sys.stderr.write("\n")
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="halfcontact",
        description="Frictional contact on the elastic half-plane")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--grid-n", type=int, dest="grid_n")
    parser.add_argument("--seed", type=int,
                        help="reserved; solvers are deterministic")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.command,
                          {"out": args.out, "grid_n": args.grid_n})
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))

    try:
        bundle = run(cfg)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except AccuracyError as exc:
        return _fail(EXIT_ACCURACY, "accuracy", str(exc))
    except (ContactError, ProfileError, ValueError) as exc:
        return _fail(EXIT_SOLVER, "solver", str(exc))

    try:
        written = emit_csv(bundle, cfg.out_dir)
    except OSError as exc:
        return _fail(EXIT_IO, "io", f"{cfg.out_dir}: {exc}")
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":                    # pragma: no cover
    sys.exit(main())
