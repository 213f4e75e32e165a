"""tegsolve command line: solve | report | sweep | multiplicity.

Each command reads a JSON run config (see io.RunConfig), writes CSV/JSON
outputs into the chosen directory, and exits with a code that identifies the
failure class:

    0  success
    2  config parse/validation error (also argparse usage errors)
    3  material error (file missing/unparsable, invalid or out-of-domain model)
    4  solver error (degenerate inputs, numerical failure, incomplete scan)
    5  output I/O error

On failure a one-line machine-readable JSON error record is printed to
stderr: {"error": <class>, "message": <text>, "exit_code": <n>}.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import analytic, io, ivp, loadmode
from .analytic import GeneratorSpec
from .errors import (
    ConfigError,
    DomainError,
    InvalidMaterial,
    NonPositiveValue,
    RangeError,
    TegError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MATERIAL = 3
EXIT_SOLVER = 4
EXIT_IO = 5


def _error_record(exc: Exception, code: int) -> int:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)
    return code


def _build_spec(cfg: io.RunConfig) -> GeneratorSpec:
    pair = io.load_material_file(cfg.material_file)
    return GeneratorSpec(pair=pair, T_h=cfg.T_h, T_c=cfg.T_c, L=cfg.L, A_c=cfg.A_c)


def _tol(cfg: io.RunConfig, key: str, default):
    return type(default)(cfg.tolerances.get(key, default))


def _solution_meta(sol: ivp.TemperatureSolution, spec: GeneratorSpec) -> dict:
    meta = {
        "theta": sol.theta,
        "y_c": sol.y_c,
        "J": sol.J,
        "R_total": sol.R_total,
        "q_h": sol.q_h,
        "q_c": sol.q_c,
        "eta": sol.eta_numeric,
        "V": spec.V,
    }
    if sol.gamma is not None:
        meta["gamma"] = sol.gamma
    if sol.R_load is not None:
        meta["R_load"] = sol.R_load
    return meta


def _write_solution(outdir: Path, stem: str, sol: ivp.TemperatureSolution,
                    spec: GeneratorSpec) -> None:
    io.write_csv(outdir / f"{stem}.csv", ["x", "T", "q"],
                 zip(sol.x, sol.T, sol.q))
    io.write_json(outdir / f"{stem}.meta.json", _solution_meta(sol, spec))


def _enumerate(cfg: io.RunConfig, spec: GeneratorSpec) -> loadmode.SolutionSet:
    prob = loadmode.LoadResistanceProblem(spec=spec, R_load=cfg.mode["R_load"])
    return loadmode.enumerate_solutions(
        prob,
        scan_samples=_tol(cfg, "scan_samples", loadmode.SCAN_SAMPLES),
        tol_root=_tol(cfg, "tol_root", loadmode.TOL_ROOT),
        tol_ode=_tol(cfg, "tol_ode", loadmode.TOL_ODE_MATERIALIZE),
        n_out=_tol(cfg, "n_out", ivp.N_OUT),
    )


def _write_multiplicity(outdir: Path, result: loadmode.SolutionSet,
                        spec: GeneratorSpec, with_curve: bool) -> None:
    io.write_csv(
        outdir / "multiplicity.csv",
        ["theta", "y_c", "R_total", "gamma_equiv", "eta", "tangency"],
        [(r.theta, r.y_c, r.R_total, r.gamma_equiv, r.eta, int(r.tangency))
         for r in result.roots],
    )
    for i, root in enumerate(result.roots):
        _write_solution(outdir, f"solution_{i:03d}", root.solution, spec)
    if with_curve:
        d = result.scan_diagnostics
        io.write_csv(outdir / "h_curve.csv", ["theta", "H"],
                     zip(d.theta_grid, d.H_values))


def cmd_solve(cfg: io.RunConfig, spec: GeneratorSpec) -> None:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    mtype = cfg.mode["type"]
    if mtype == "ratio":
        sol = ivp.solve_ratio_mode(spec, cfg.mode["gamma"],
                                   tol_ode=_tol(cfg, "tol_ode", ivp.TOL_ODE),
                                   n_out=_tol(cfg, "n_out", ivp.N_OUT))
        _write_solution(outdir, "solution", sol, spec)
    elif mtype == "resistance":
        result = _enumerate(cfg, spec)
        _write_multiplicity(outdir, result, spec, with_curve=False)
    else:
        raise ConfigError(f"solve expects a ratio or resistance mode, got {mtype!r}")


def cmd_report(cfg: io.RunConfig, spec: GeneratorSpec) -> None:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    gamma = cfg.mode.get("gamma") if cfg.mode.get("type") == "ratio" else None
    report = analytic.performance_report(spec, gamma)
    io.write_json(outdir / "report.json", report.to_json())
    g_max = cfg.tolerances.get("sweep_gamma_max", 3.0 * report.gamma_opt)
    n = int(cfg.tolerances.get("sweep_n", 257))
    gammas = np.linspace(0.0, g_max, n)
    io.write_csv(outdir / "eta_sweep.csv", ["gamma", "eta"],
                 ((g, analytic.efficiency(spec, g)) for g in gammas))


def cmd_sweep(cfg: io.RunConfig, spec: GeneratorSpec) -> None:
    if cfg.mode["type"] != "sweep":
        raise ConfigError("sweep expects a sweep mode config")
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    tol_ode = _tol(cfg, "tol_ode", ivp.TOL_ODE)
    n_out = _tol(cfg, "n_out", ivp.N_OUT)
    gammas = np.linspace(cfg.mode["gamma_min"], cfg.mode["gamma_max"],
                         int(cfg.mode["n"]))
    rows = []
    for g in gammas:
        sol = ivp.solve_ratio_mode(spec, float(g), tol_ode=tol_ode, n_out=n_out)
        eta_cf = analytic.efficiency(spec, float(g)) if spec.V != 0 else 0.0
        rows.append((g, eta_cf, sol.eta_numeric, sol.theta, sol.y_c, sol.J,
                     sol.R_total, sol.q_h, sol.q_c))
    io.write_csv(
        outdir / "sweep.csv",
        ["gamma", "eta_closed_form", "eta_numeric", "theta", "y_c", "J",
         "R_total", "q_h", "q_c"],
        rows,
    )


def cmd_multiplicity(cfg: io.RunConfig, spec: GeneratorSpec) -> None:
    if cfg.mode["type"] != "multiplicity":
        raise ConfigError("multiplicity expects a multiplicity mode config")
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    result = _enumerate(cfg, spec)
    _write_multiplicity(outdir, result, spec, with_curve=True)


_COMMANDS = {
    "solve": cmd_solve,
    "report": cmd_report,
    "sweep": cmd_sweep,
    "multiplicity": cmd_multiplicity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tegsolve",
        description="Steady states, currents and efficiency of one-dimensional "
                    "thermoelectric generators with temperature-dependent "
                    "kappa(T) and rho(T) and a constant Seebeck coefficient.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "solve one steady state (ratio mode) or all of them "
                  "(resistance mode) and write profile CSVs"),
        ("report", "closed-form performance report (z, eta curve, optimum, "
                   "flux and profile-shape diagnostics)"),
        ("sweep", "solve over a gamma range and tabulate closed-form vs "
                  "numeric efficiency"),
        ("multiplicity", "enumerate all steady states at a fixed load "
                         "resistance, with the H-curve"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--tol-ode", type=float, default=None,
                       help="integrator relative tolerance override")
        p.add_argument("--scan-samples", type=int, default=None,
                       help="theta-scan resolution override (multiplicity)")
        p.add_argument("--dump-config", action="store_true",
                       help="print the normalized config and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = io.load_config(args.config)
    except ConfigError as exc:
        return _error_record(exc, EXIT_CONFIG)
    if args.out is not None:
        cfg.output_dir = args.out
    if args.tol_ode is not None:
        cfg.tolerances["tol_ode"] = args.tol_ode
    if args.scan_samples is not None:
        cfg.tolerances["scan_samples"] = args.scan_samples
    if args.dump_config:
        print(json.dumps(cfg.to_json(), indent=2, sort_keys=True))
        return EXIT_OK

    try:
        spec = _build_spec(cfg)
    except (InvalidMaterial, DomainError, NonPositiveValue, RangeError) as exc:
        return _error_record(exc, EXIT_MATERIAL)

    t0 = time.perf_counter()
    try:
        _COMMANDS[args.command](cfg, spec)
    except ConfigError as exc:
        return _error_record(exc, EXIT_CONFIG)
    except TegError as exc:
        return _error_record(exc, EXIT_SOLVER)
    except OSError as exc:
        return _error_record(exc, EXIT_IO)
    print(f"{args.command}: ok ({time.perf_counter() - t0:.2f} s) -> {cfg.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
