"""Command-line interface producing bit-stable data products.

One binary with subcommands; every run is driven by a JSON config file
and writes one CSV (gridded series) or NDJSON (records) data product
plus a JSON run manifest.  Numbers are serialized with 17 significant
digits so files round-trip exactly; identical (config, seed) runs
produce byte-identical data products for any worker count.

Exit codes: 0 success, 2 configuration error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import difflib
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .core import FieldSchedule, ModelParams, south_pole
from .flows import (
    BiasSpec,
    NoiseSpec,
    angular_field,
    biased_field,
    lindblad_field,
    unitary_field,
)
from .integrate import (
    EnsembleSpec,
    IntegratorConfig,
    NonConvergenceError,
    integrate_angular_radial,
    integrate_ode,
    integrate_sde,
    run_ensemble,
    run_sweep,
)
from .oracle import CalibrationError, calibrate
from .analysis import (
    find_fixed_points,
    flow_field_grid,
    linear_spectrum,
    phi_sweep,
)

COMMANDS = (
    "flowfield",
    "trajectory",
    "ensemble",
    "sweep",
    "fixed-points",
    "spectrum",
    "free-energy",
    "calibrate",
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    """Invalid run configuration; collects one message per violation."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


# --------------------------------------------------------------------------
# serialization helpers


def fmt_float(x: float) -> str:
    """17-significant-digit decimal form; exact on round trip."""
    return f"{float(x):.17g}"


def _jsonify(obj: Any) -> Any:
    """Recursively convert to JSON-safe values with 17-digit floats.

    Non-finite floats become null (strict JSON has no Infinity/NaN).
    """

    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return _FloatLiteral(fmt_float(x))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


class _FloatLiteral:
    """Marker emitting a pre-formatted float into a JSON document."""

    def __init__(self, text: str):
        self.text = text


def dumps_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, 17-digit floats."""

    def encode(o: Any) -> str:
        if o is None:
            return "null"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, _FloatLiteral):
            return o.text
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return fmt_float(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            items = sorted(o.items())
            return "{" + ",".join(f"{json.dumps(k)}:{encode(v)}" for k, v in items) + "}"
        if isinstance(o, (list, tuple)):
            return "[" + ",".join(encode(v) for v in o) + "]"
        raise TypeError(f"cannot serialize {type(o)!r}")

    return encode(_jsonify(obj))


def write_csv(path: Path, columns: list[str], rows, units: str) -> None:
    """CSV with a commented header naming columns and units."""
    lines = [f"# columns: {', '.join(columns)} ({units})", ",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_ndjson(path: Path, records: list[dict]) -> None:
    path.write_text("\n".join(dumps_json(r) for r in records) + "\n")


# --------------------------------------------------------------------------
# configuration schema


_SCHEMA: dict[str, dict[str, type | tuple]] = {
    "": {
        "command": str,
        "params": dict,
        "schedule": dict,
        "bias": dict,
        "noise": dict,
        "integrator": dict,
        "trajectory": dict,
        "flowfield": dict,
        "ensemble": dict,
        "sweep": dict,
        "free_energy": dict,
        "spectrum": dict,
        "fixed_points": dict,
        "calibrate": dict,
        "output": str,
        "master_seed": int,
        "workers": int,
    },
    "params": {"J": (int, float), "gamma": (int, float), "s1": (int, float), "s2": (int, float)},
    "schedule": {"kind": str, "h0": (int, float), "h1": (int, float), "T": (int, float)},
    "bias": {"kind": str, "s": (int, float)},
    "noise": {"variance_rate": (int, float), "master_seed": int},
    "integrator": {
        "rel_tol": (int, float),
        "abs_tol": (int, float),
        "dt_init": (int, float),
        "dt_max": (int, float),
        "renormalize": bool,
        "max_steps": int,
    },
    "trajectory": {
        "flow": str,
        "t_final": (int, float),
        "n0": list,
        "d0": (int, float),
        "h": (int, float),
        "dt": (int, float),
    },
    "flowfield": {"flow": str, "chart": str, "resolution": int, "extent": (int, float), "h": (int, float)},
    "ensemble": {"n_traj": int, "dt": (int, float), "t_final": (int, float), "n_out": int, "fidelity_bins": int},
    "sweep": {"noisy": bool, "dt": (int, float)},
    "free_energy": {"kind": str, "s_min": (int, float), "s_max": (int, float), "s_step": (int, float)},
    "spectrum": {"gamma_min": (int, float), "gamma_max": (int, float), "n": int},
    "fixed_points": {"flow": str, "seed_grid": int, "extent": (int, float)},
    "calibrate": {"n_samples": int, "seed": int},
}

_FLOWS = ("unitary", "lindblad", "angular", "biased_linear", "biased_variance", "angular_radial", "sde")


def _line_of(raw: str, key: str) -> str:
    for i, line in enumerate(raw.splitlines(), start=1):
        if f'"{key}"' in line:
            return f"line {i}"
    return "unknown line"


def _check_keys(section: str, obj: dict, raw: str, violations: list[str]) -> None:
    schema = _SCHEMA[section]
    label = section or "top level"
    for key, value in obj.items():
        if key not in schema:
            hint = difflib.get_close_matches(key, schema.keys(), n=1)
            suggest = f"; did you mean {hint[0]!r}?" if hint else ""
            violations.append(f"{_line_of(raw, key)}: unknown key {key!r} in {label}{suggest}")
            continue
        expected = schema[key]
        expected_tuple = expected if isinstance(expected, tuple) else (expected,)
        ok = isinstance(value, expected_tuple)
        if isinstance(value, bool) and bool not in expected_tuple:
            ok = False
        if not ok:
            names = "/".join(t.__name__ for t in expected_tuple)
            violations.append(
                f"{_line_of(raw, key)}: key {key!r} in {label} must be {names}, got {type(value).__name__}"
            )
    if section == "":
        for key, value in obj.items():
            if key in _SCHEMA and key != "" and isinstance(value, dict):
                _check_keys(key, value, raw, violations)


@dataclass
class RunConfig:
    """Validated run configuration assembled from a JSON document."""

    command: str
    params: ModelParams
    schedule: FieldSchedule | None
    bias: BiasSpec | None
    noise: NoiseSpec | None
    integrator: IntegratorConfig
    sections: dict[str, dict] = field(default_factory=dict)
    output: str | None = None
    master_seed: int = 0
    workers: int | None = None
    raw: dict = field(default_factory=dict)


def load_config(path: Path, command: str | None = None) -> RunConfig:
    """Parse and validate a config file; raises ConfigError on any violation."""
    try:
        raw_text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read config file: {exc}"])
    try:
        doc = json.loads(raw_text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"line {exc.lineno}: config is not valid JSON: {exc.msg}"])
    if not isinstance(doc, dict):
        raise ConfigError(["config root must be a JSON object"])

    violations: list[str] = []
    _check_keys("", doc, raw_text, violations)
    if violations:
        raise ConfigError(violations)

    cfg_command = doc.get("command", command)
    if command is not None and "command" in doc and doc["command"] != command:
        violations.append(
            f"{_line_of(raw_text, 'command')}: config command {doc['command']!r} "
            f"does not match subcommand {command!r}"
        )
    if cfg_command not in COMMANDS:
        violations.append(f"unknown command {cfg_command!r}; expected one of {COMMANDS}")
    if violations:
        raise ConfigError(violations)

    def build(cls, section: str, **defaults):
        data = {**defaults, **doc.get(section, {})}
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            violations.append(f"{_line_of(raw_text, section)}: invalid {section}: {exc}")
            return None

    params = build(ModelParams, "params", J=1.0) or ModelParams()
    schedule = build(FieldSchedule, "schedule") if "schedule" in doc else None
    bias = build(BiasSpec, "bias") if "bias" in doc else None
    noise = build(NoiseSpec, "noise") if "noise" in doc else None
    integrator = build(IntegratorConfig, "integrator") or IntegratorConfig()

    flow_sections = [doc.get(k, {}) for k in ("trajectory", "flowfield", "fixed_points")]
    for sec in flow_sections:
        flow = sec.get("flow")
        if flow is not None and flow not in _FLOWS:
            hint = difflib.get_close_matches(flow, _FLOWS, n=1)
            suggest = f"; did you mean {hint[0]!r}?" if hint else ""
            violations.append(f"{_line_of(raw_text, 'flow')}: unknown flow {flow!r}{suggest}")

    fe = doc.get("free_energy", {})
    if fe:
        if fe.get("kind") not in ("linear", "variance"):
            violations.append(f"{_line_of(raw_text, 'free_energy')}: free_energy.kind must be 'linear' or 'variance'")
        if fe.get("s_step", 0.02) <= 0:
            violations.append(f"{_line_of(raw_text, 's_step')}: s_step must be positive")
    ens = doc.get("ensemble", {})
    if ens and ens.get("n_traj", 1) < 1:
        violations.append(f"{_line_of(raw_text, 'n_traj')}: n_traj must be at least 1")

    if violations:
        raise ConfigError(violations)

    return RunConfig(
        command=cfg_command,
        params=params,
        schedule=schedule,
        bias=bias,
        noise=noise,
        integrator=integrator,
        sections={k: doc.get(k, {}) for k in ("trajectory", "flowfield", "ensemble", "sweep", "free_energy", "spectrum", "fixed_points", "calibrate")},
        output=doc.get("output"),
        master_seed=doc.get("master_seed", 0),
        workers=doc.get("workers"),
        raw=doc,
    )


# --------------------------------------------------------------------------
# flow resolution


def _resolve_field(cfg: RunConfig, section: dict):
    """Turn a flow name plus config sections into a vectorized field."""
    flow = section.get("flow", "angular")
    p = cfg.params
    h = section.get("h", 0.0)
    if flow == "unitary":
        return lambda n: unitary_field(n, p.J, h)
    if flow == "lindblad":
        return lambda n: lindblad_field(n, p.J, p.gamma)
    if flow == "angular":
        return lambda n: angular_field(n, p.J, p.gamma)
    if flow in ("biased_linear", "biased_variance"):
        kind = "linear" if flow == "biased_linear" else "variance"
        if cfg.bias is not None and cfg.bias.kind == kind:
            bias = cfg.bias
        else:
            s = p.s1 if kind == "linear" else p.s2
            bias = BiasSpec(kind=kind, s=s)
        return lambda n: biased_field(n, p.J, bias)
    raise ConfigError([f"flow {flow!r} cannot be used here"])


# --------------------------------------------------------------------------
# command implementations (each returns (data_path, results_dict))


def _cmd_flowfield(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["flowfield"]
    chart = sec.get("chart", "stereo")
    res = sec.get("resolution", 24)
    extent = sec.get("extent", 2.5)
    fieldfn = _resolve_field(cfg, sec)
    table = flow_field_grid(fieldfn, chart=chart, resolution=res, extent=extent)
    path = out_dir / (cfg.output or "flowfield.csv")
    if chart == "stereo":
        cols = ["w_re", "w_im", "nx", "ny", "nz", "vx", "vy", "vz", "dw_re", "dw_im"]
        units = "w dimensionless, velocities in J"
    else:
        cols = ["ny", "nz", "vx", "vy", "vz"]
        units = "positions dimensionless, velocities in J"
    write_csv(path, cols, table, units)
    return path, {"rows": int(table.shape[0]), "chart": chart}


def _cmd_trajectory(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["trajectory"]
    flow = sec.get("flow", "angular")
    t_final = float(sec.get("t_final", 50.0))
    n0 = np.asarray(sec.get("n0", south_pole()), dtype=float)
    n0 = n0 / np.linalg.norm(n0)
    path = out_dir / (cfg.output or "trajectory.csv")

    if flow == "sde":
        noise = cfg.noise or NoiseSpec.from_params(cfg.params, seed)
        h = cfg.schedule if cfg.schedule is not None else sec.get("h", 0.0)
        traj = integrate_sde(
            cfg.params.J, h, noise, n0, float(sec.get("dt", 1e-3)), (0.0, t_final),
            trajectory_index=0,
        )
        write_csv(path, ["t", "nx", "ny", "nz"],
                  np.column_stack([traj.times, traj.states]), "t in 1/J")
        return path, {"flow": flow, "final_nz": float(traj.final_state[2])}

    if flow == "angular_radial":
        traj = integrate_angular_radial(
            cfg.params.J, cfg.params.gamma, n0, float(sec.get("d0", 1.0)),
            (0.0, t_final), cfg.integrator,
        )
        write_csv(path, ["t", "nx", "ny", "nz", "d"],
                  np.column_stack([traj.times, traj.states, traj.d]), "t in 1/J")
        return path, {"flow": flow, "final_d": float(traj.d[-1])}

    fieldfn = _resolve_field(cfg, sec)
    icfg = cfg.integrator
    if flow == "lindblad":
        icfg = IntegratorConfig(
            rel_tol=icfg.rel_tol, abs_tol=icfg.abs_tol, dt_init=icfg.dt_init,
            dt_max=icfg.dt_max, renormalize=False, max_steps=icfg.max_steps,
        )
    traj = integrate_ode(lambda t, n: fieldfn(n), n0, (0.0, t_final), icfg)
    write_csv(path, ["t", "nx", "ny", "nz"],
              np.column_stack([traj.times, traj.states]), "t in 1/J")
    return path, {"flow": flow, "final_nz": float(traj.final_state[2])}


def _cmd_ensemble(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["ensemble"]
    noise = cfg.noise or NoiseSpec.from_params(cfg.params, seed)
    h = cfg.schedule if cfg.schedule is not None else 0.0
    t_final = float(sec.get("t_final", cfg.schedule.T if cfg.schedule else 10.0))
    spec = EnsembleSpec(
        J=cfg.params.J,
        noise=noise,
        h=h,
        dt=float(sec.get("dt", 1e-3)),
        t_span=(0.0, t_final),
        n_out=int(sec.get("n_out", 101)),
        fidelity_bins=int(sec.get("fidelity_bins", 50)),
    )
    stats = run_ensemble(spec, int(sec.get("n_traj", 1000)), seed, workers)
    records: list[dict] = []
    mean, sem = stats.mean, stats.sem
    for i, t in enumerate(stats.t_grid):
        records.append(
            {
                "kind": "moment",
                "t": float(t),
                "mean_nx": float(mean[i, 0]),
                "mean_ny": float(mean[i, 1]),
                "mean_nz": float(mean[i, 2]),
                "sem_nx": float(sem[i, 0]),
                "sem_ny": float(sem[i, 1]),
                "sem_nz": float(sem[i, 2]),
            }
        )
    records.append(
        {"kind": "crossing", "fraction": stats.crossing_fraction, "count": stats.count}
    )
    records.append(
        {
            "kind": "fidelity_hist",
            "edges": stats.fidelity_edges,
            "counts": stats.fidelity_hist.tolist(),
            "mean_fidelity": stats.mean_fidelity,
        }
    )
    path = out_dir / (cfg.output or "ensemble.ndjson")
    write_ndjson(path, records)
    return path, {
        "n_traj": stats.count,
        "crossing_fraction": stats.crossing_fraction,
        "mean_fidelity": stats.mean_fidelity,
    }


def _cmd_sweep(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["sweep"]
    schedule = cfg.schedule or FieldSchedule(kind="linear_ramp", h0=-20.0, h1=20.0, T=200.0)
    noise = None
    if sec.get("noisy", False):
        noise = cfg.noise or NoiseSpec.from_params(cfg.params, seed)
    traj, fidelity = run_sweep(
        cfg.params.J, schedule, noise=noise, cfg=cfg.integrator, dt=float(sec.get("dt", 1e-3))
    )
    hs = np.asarray(schedule(traj.times), dtype=float)
    path = out_dir / (cfg.output or "sweep.csv")
    write_csv(path, ["t", "h", "nx", "ny", "nz"],
              np.column_stack([traj.times, hs, traj.states]), "t in 1/J, h in J")
    return path, {"final_fidelity": fidelity}


def _cmd_fixed_points(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["fixed_points"]
    fieldfn = _resolve_field(cfg, sec)
    records = find_fixed_points(
        fieldfn,
        seed_grid=int(sec.get("seed_grid", 24)),
        extent=float(sec.get("extent", 2.4)),
    )
    rows = []
    for r in records:
        rows.append(
            {
                "nx": float(r.location[0]),
                "ny": float(r.location[1]),
                "nz": float(r.location[2]),
                "w_re": r.w.real,
                "w_im": r.w.imag,
                "class": r.classification,
                "eig_re1": r.eigenvalues[0].real,
                "eig_im1": r.eigenvalues[0].imag,
                "eig_re2": r.eigenvalues[1].real,
                "eig_im2": r.eigenvalues[1].imag,
                "residual": r.residual,
            }
        )
    path = out_dir / (cfg.output or "fixed_points.ndjson")
    write_ndjson(path, rows)
    counts: dict[str, int] = {}
    for r in records:
        counts[r.classification] = counts.get(r.classification, 0) + 1
    return path, {"count": len(records), "classes": counts}


def _cmd_spectrum(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["spectrum"]
    if sec:
        gammas = np.linspace(
            float(sec.get("gamma_min", 0.0)),
            float(sec.get("gamma_max", 4.0 * cfg.params.J)),
            int(sec.get("n", 81)),
        )
    else:
        gammas = np.array([cfg.params.gamma])
    rows = []
    for g in gammas:
        rec = linear_spectrum(cfg.params.J, float(g))
        e = rec.eigenvalues
        rows.append([g, e[0].real, e[0].imag, e[1].real, e[1].imag, e[2].real, e[2].imag, rec.regime])
    path = out_dir / (cfg.output or "spectrum.csv")
    write_csv(path, ["gamma", "re1", "im1", "re2", "im2", "re3", "im3", "regime"],
              rows, "gamma in J, rates in J")
    return path, {"n_points": len(rows)}


def _cmd_free_energy(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["free_energy"]
    kind = sec.get("kind", cfg.bias.kind if cfg.bias else "linear")
    s_min = float(sec.get("s_min", 0.0))
    s_max = float(sec.get("s_max", 2.5 * cfg.params.J))
    s_step = float(sec.get("s_step", 0.02))
    grid = np.arange(s_min, s_max + 1e-12, s_step)
    curve = phi_sweep(kind, cfg.params.J, grid, workers=workers)
    flagged = {round(t.s, 12): t.kind for t in curve.transitions}
    rows = []
    for i, s in enumerate(curve.s_grid):
        mark = ""
        for ts, tk in flagged.items():
            if abs(s - ts) <= s_step / 2 + 1e-12:
                mark = tk
        rows.append([float(s), float(curve.phi[i]), int(curve.converged[i]), "window_avg", mark])
    path = out_dir / (cfg.output or "free_energy.csv")
    write_csv(path, ["s", "phi", "converged", "estimator", "transition"],
              rows, "s in J, phi in J")
    results = {
        "transitions": [{"s": t.s, "kind": t.kind, "strength": t.strength} for t in curve.transitions],
        "unconverged": int((~curve.converged).sum()),
    }
    return path, results


def _cmd_calibrate(cfg: RunConfig, out_dir: Path, seed: int, workers: int):
    sec = cfg.sections["calibrate"]
    report = calibrate(
        n_samples=int(sec.get("n_samples", 1024)),
        seed=int(sec.get("seed", 20260810)),
    )
    path = out_dir / (cfg.output or "calibration.json")
    path.write_text(report.to_json() + "\n")
    return path, {"kappa_over_s": report.kappa_over_s}


_IMPL = {
    "flowfield": _cmd_flowfield,
    "trajectory": _cmd_trajectory,
    "ensemble": _cmd_ensemble,
    "sweep": _cmd_sweep,
    "fixed-points": _cmd_fixed_points,
    "spectrum": _cmd_spectrum,
    "free-energy": _cmd_free_energy,
    "calibrate": _cmd_calibrate,
}


# --------------------------------------------------------------------------
# entry point


def _resolve_workers(args_workers: int | None, cfg_workers: int | None) -> int:
    if args_workers is not None:
        return args_workers
    if cfg_workers is not None:
        return cfg_workers
    env = os.environ.get("DIMER_DPT_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def run(command: str, config_path: Path, out_dir: Path, seed: int | None, workers: int | None) -> int:
    t_start = time.monotonic()
    cfg = load_config(config_path, command)
    out_dir.mkdir(parents=True, exist_ok=True)
    eff_seed = seed if seed is not None else cfg.master_seed
    eff_workers = _resolve_workers(workers, cfg.workers)

    data_path, results = _IMPL[command](cfg, out_dir, eff_seed, eff_workers)

    manifest = {
        "schema": "run-manifest/v1",
        "command": command,
        "config": cfg.raw,
        "seed": eff_seed,
        "workers": eff_workers,
        "versions": {
            "dimer_dpt": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": time.monotonic() - t_start,
        "outputs": [data_path.name],
        "results": results,
    }
    manifest_path = out_dir / (data_path.stem + ".manifest.json")
    manifest_path.write_text(dumps_json(manifest) + "\n")
    print(f"wrote {data_path} and {manifest_path.name}")
    return EXIT_OK


def validate(config_path: Path) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        return EXIT_CONFIG
    print(f"OK: {config_path} is a valid {cfg.command!r} configuration")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dimer-dpt",
        description="Dissipative spin-dimer transport: trajectories, ensembles, and phase structure.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} computation")
        p.add_argument("--config", type=Path, required=True, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config master_seed")
        p.add_argument("--workers", type=int, default=None, help="parallel workers")
    pv = sub.add_parser("validate", help="validate a configuration without running")
    pv.add_argument("--config", type=Path, required=True)

    args = parser.parse_args(argv)
    try:
        if args.subcommand == "validate":
            return validate(args.config)
        return run(args.subcommand, args.config, args.out, args.seed, args.workers)
    except ConfigError as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergenceError, CalibrationError) as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
