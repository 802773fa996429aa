"""Command-line experiment runner.

    wqed list
    wqed <experiment> --config cfg.json [--out DIR] [--threads N] [--svg]

A config is a JSON object with optional keys ``experiment``, ``params``,
``seed``, ``output_dir`` and ``emit_svg``.  Unknown keys anywhere are
rejected.  Exit codes: 0 success, 2 invalid input, 3 runtime abort.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from . import __version__, analytic2le, lattice, router3le, rydberg
from .artifacts import sha256, svg_plot, write_csv
from .core import CoherentInput, EmitterParams, ParameterError, ThreeLevelParams, make_grid

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ABORT = 3

CONFIG_KEYS = {"experiment", "params", "seed", "output_dir", "emit_svg"}
INTEGER_PARAMS = {"n", "n_sites", "n_points", "n_steps", "n_tau", "points_per_rB"}


class ConfigError(ValueError):
    """Malformed or unknown configuration entries."""


@dataclass
class Table:
    """One CSV file: name, (column, unit) pairs, rows and plot hints."""

    filename: str
    columns: list[tuple[str, str]]
    rows: list
    plot_x: str | None = None
    plot_y: list[str] = field(default_factory=list)
    note: str = ""


@dataclass
class Outcome:
    tables: list[Table]
    knobs: dict
    summary: dict


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    defaults: dict
    runner: Callable[[dict, int], Outcome]


def _parallel_map(fn, items, threads: int) -> list:
    """Ordered map; results are placed by index so output never depends on scheduling."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _label(value: float) -> str:
    return repr(float(value))


# -- experiments ------------------------------------------------------------------

def run_spectrum2le(p: dict, threads: int) -> Outcome:
    e = EmitterParams(gamma=p["gamma"], Gamma=p["Gamma"])
    grid = make_grid(p["delta_min"] * e.Gamma, p["delta_max"] * e.Gamma, p["n"])
    s = analytic2le.one_photon_coefficients(e, grid)
    rows = [(d / e.Gamma, T, R) for d, T, R in zip(s.delta, s.T, s.R)]
    table = Table("spectrum.csv", [("delta_over_Gamma", "1"), ("T", "1"), ("R", "1")], rows,
                  "delta_over_Gamma", ["T", "R"])
    R0 = float(analytic2le.reflection_coefficient(e, 0.0))
    return Outcome([table], {"n": p["n"]}, {"R_at_resonance": R0})


def run_twophoton2le(p: dict, threads: int) -> Outcome:
    e = EmitterParams(omega_e=p["omega_e"], Gamma=p["Gamma"], v_g=p["v_g"])
    scale = e.v_g / e.Gamma
    x = np.linspace(p["x_min"], p["x_max"], p["n"]) * scale
    xc = p["x_c"] * scale
    a = analytic2le.two_photon_asymptotics(e, xc + x / 2, xc - x / 2)
    rows = [(xi / scale, abs(t) ** 2, abs(r) ** 2) for xi, t, r in zip(x, a.t2, a.r2)]
    table = Table("two_photon.csv",
                  [("x_Gamma_over_vg", "v_g/Gamma"), ("abs_t2_sq", "1"), ("abs_r2_sq", "1")],
                  rows, "x_Gamma_over_vg", ["abs_t2_sq", "abs_r2_sq"],
                  note=f"relative coordinate x = x1 - x2 at centre x_c = {p['x_c']!r} v_g/Gamma")
    r0 = analytic2le.two_photon_asymptotics(e, xc, xc)
    return Outcome([table], {"n": p["n"]}, {"abs_r2_sq_at_0": float(abs(r0.r2) ** 2),
                                            "abs_t2_sq_at_0": float(abs(r0.t2) ** 2)})


def run_g2coherent(p: dict, threads: int) -> Outcome:
    e = EmitterParams(omega_e=p["omega_e"], gamma=p["gamma"], Gamma=p["Gamma"], v_g=p["v_g"])
    inp = CoherentInput(k0=p["k0"], Delta_k=p["Delta_k"])
    tau = np.linspace(p["tau_min"], p["tau_max"], p["n"])
    g2 = analytic2le.g2_transmitted(e, inp, tau)
    rows = list(zip(tau, g2))
    table = Table("g2.csv", [("tau", "1/gamma"), ("g2", "1")], rows, "tau", ["g2"])
    zero = float(analytic2le.g2_transmitted(e, inp, 0.0))
    knobs = {"quad_epsabs": analytic2le.QUAD_EPSABS, "quad_epsrel": analytic2le.QUAD_EPSREL,
             "quad_sigmas": analytic2le.QUAD_SIGMAS, "n": p["n"]}
    return Outcome([table], knobs, {"g2_at_0": zero, "g2_min": float(g2.min()), "g2_max": float(g2.max())})


def run_router(p: dict, threads: int) -> Outcome:
    base = EmitterParams(gamma=p["gamma"], Gamma=p["Gamma"])
    grid = make_grid(p["delta_min"] * base.Gamma, p["delta_max"] * base.Gamma, p["n"])
    columns = [("delta_over_Gamma", "1")]
    data = [grid.values / base.Gamma]
    splittings = {}
    for oc in p["Omega_c"]:
        tp = ThreeLevelParams(base=base, gamma_s=p["gamma_s"], Omega_c=oc, Delta_c=p["Delta_c"])
        s = router3le.router_amplitudes(tp, grid)
        columns += [(f"T_Omega_c={_label(oc)}", "1"), (f"R_Omega_c={_label(oc)}", "1")]
        data += [s.T, s.R]
        if oc >= router3le.ATS_STRONG_DRIVE * base.total_width:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", router3le.WeakDriveWarning)
                splittings[_label(oc)] = router3le.ats_splitting(tp)
    rows = list(zip(*data))
    table = Table("router.csv", columns, rows, "delta_over_Gamma",
                  [c for c, _ in columns if c.startswith("T_")])
    knobs = {"ats_scan_points": router3le.ATS_SCAN_POINTS, "ats_scan_span": router3le.ATS_SCAN_SPAN,
             "ats_strong_drive": router3le.ATS_STRONG_DRIVE}
    return Outcome([table], knobs, {"ats_splitting": splittings})


def _auto_width(n_sites: int, extra: float = 0.0) -> float:
    """Largest packet width (sites) that fits the lattice geometry with the emitter centred."""
    room = n_sites - 1 - n_sites // 2 - 2
    return 0.98 * room / (lattice.CLEAR_WIDTHS + lattice.WALL_WIDTHS + extra)


def run_latticeT(p: dict, threads: int) -> Outcome:
    J, G = p["J"], p["Gamma"]
    V0 = lattice.coupling_for_width(G, J)
    sigma_k = p["sigma_k"] or 1.0 / (2.0 * _auto_width(p["n_sites"]))
    packet = lattice.WavePacket(sigma_k=sigma_k)
    deltas = [float(d) for d in p["detunings_over_Gamma"]]

    def one(d):
        model = lattice.build_model(J=J, omega_e=-d * G, V0=V0, n_sites=p["n_sites"])
        run = lattice.transmission_from_run(model, packet, p["dt"], p["clear_widths"])
        analytic = float(analytic2le.transmission_coefficient(EmitterParams(Gamma=G), d * G))
        return d, run, analytic, lattice.packet_averaged_transmission(model, packet)

    results = _parallel_map(one, deltas, threads)
    rows = [(d, run.T, run.R, an, avg, abs(run.T - an), run.residual, run.norm_drift, run.steps)
            for d, run, an, avg in results]
    table = Table("lattice_transmission.csv",
                  [("delta_over_Gamma", "1"), ("T_lattice", "1"), ("R_lattice", "1"), ("T_analytic", "1"),
                   ("T_packet_averaged", "1"), ("abs_error", "1"), ("residual", "1"), ("norm_drift", "1"),
                   ("steps", "count")],
                  rows, "delta_over_Gamma", ["T_lattice", "T_analytic"],
                  note=f"Gamma = {G!r} J, k0 = pi/2")
    tables = [table]
    if p["snapshot"]:
        for d, run, _, _ in results:
            psi = run.psi
            sites = np.arange(psi.size)
            tables.append(Table(f"snapshot_delta={_label(d)}.csv",
                                [("site", "index"), ("re_psi", "1"), ("im_psi", "1")],
                                list(zip(sites, psi.real, psi.imag)),
                                note=f"final state; index {psi.size - 1} is the emitter mode"))
    knobs = dict(results[0][1].knobs)
    knobs.update({"edge_tolerance": lattice.EDGE_TOLERANCE, "max_dt_J": lattice.MAX_DT_J,
                  "norm_drift_per_1e4": lattice.NORM_DRIFT_PER_1E4})
    summary = {"max_abs_error": max(r[5] for r in rows), "max_residual": max(r[6] for r in rows),
               "max_norm_drift": max(r[7] for r in rows)}
    return Outcome(tables, knobs, summary)


def run_latticeG2(p: dict, threads: int) -> Outcome:
    J, G = p["J"], p["Gamma"]
    U = math.inf if p["U"] is None else float(p["U"])
    model = lattice.build_model(J=J, omega_e=0.0, V0=lattice.coupling_for_width(G, J), U=U,
                                n_sites=p["n_sites"])
    sigma_k = p["sigma_k"] or 1.0 / (2.0 * _auto_width(p["n_sites"]))
    packet = lattice.WavePacket(sigma_k=sigma_k)
    field_ = lattice.two_photon_g2_map(model, packet, p["dt"])
    rows = list(zip(field_.separation, field_.tt, field_.rr, field_.tt_norm, field_.rr_norm))
    table = Table("lattice_g2.csv",
                  [("separation", "sites"), ("tt", "probability"), ("rr", "probability"),
                   ("tt_normalized", "1"), ("rr_normalized", "1")],
                  rows, "separation", ["tt", "rr"],
                  note="tt, rr: coincidence probability per separation; *_normalized: divided by the "
                       "uncorrelated product of marginals")
    sep = field_.separation
    i0 = int(np.nonzero(sep == 0)[0][0])
    near = np.abs(sep) <= max(1, int(round(packet.width)))
    summary = {"tt_argmax": int(sep[np.argmax(field_.tt)]),
               "rr_argmin_near_zero": int(sep[near][np.argmin(field_.rr[near])]),
               "rr_local_min_at_zero": bool(field_.rr[i0] < min(field_.rr[i0 - 1], field_.rr[i0 + 1])),
               "max_double_occupancy": field_.max_double_occupancy}
    return Outcome([table], dict(field_.knobs), summary)


def _medium(p: dict) -> rydberg.RydbergMedium:
    return rydberg.RydbergMedium.from_blockade(OD_B=p["OD_B"], L=p["L"], Delta=p["Delta"], r_B=p["r_B"],
                                               gamma=p["gamma"], Omega_c=p["Omega_c"])


def run_rydbergRun(p: dict, threads: int) -> Outcome:
    m = _medium(p)
    psi0 = rydberg.initial_field(m, p["n_points"], p["half_width"])
    out = rydberg.evolve_psi(m, psi0, p["n_steps"], smoothing=p["smoothing"], dissipative=p["dissipative"])
    tau_max = p["tau_window"] * m.r_B / m.v_EIT
    tau = np.linspace(-tau_max, tau_max, p["n_tau"])
    curves = rydberg.g2_and_phase(m, out, tau)
    corr = Table("g2_phase.csv", [("tau", "1/gamma"), ("g2", "1"), ("phi", "rad")],
                 list(zip(curves.tau, curves.g2, curves.phi)), "tau", ["g2", "phi"],
                 note=f"r = v_EIT tau with v_EIT = {m.v_EIT!r} r_B gamma")
    psi = Table("psi.csv", [("r", "r_B"), ("re_psi", "1"), ("im_psi", "1"), ("abs_psi_sq", "1")],
                list(zip(out.r / m.r_B, out.values.real, out.values.imag, np.abs(out.values) ** 2)),
                "r", ["abs_psi_sq"])
    zero = rydberg.g2_and_phase(m, out, [0.0])
    summary = {"g2_at_0": float(zero.g2[0]), "phi_at_0": float(zero.phi[0]), "OD": m.OD,
               "phase_estimate": rydberg.conditional_phase_estimate(m), "flags": list(out.flags)}
    if not p["dissipative"]:
        ground = rydberg.bound_states_on_grid(m, out.r)[0]
        summary["ground_state_overlap"] = rydberg.bound_state_overlap(out, ground)
    knobs = dict(out.knobs)
    knobs.update({"max_potential_phase": rydberg.MAX_POTENTIAL_PHASE, "max_courant": rydberg.MAX_COURANT,
                  "wall_tolerance": rydberg.WALL_TOLERANCE})
    return Outcome([corr, psi], knobs, summary)


def run_rydbergBound(p: dict, threads: int) -> Outcome:
    m = _medium(p)
    states = rydberg.bound_states(m, p["points_per_rB"])
    eig = Table("eigenvalues.csv", [("index", "count"), ("eigenvalue", "gamma/r_B")],
                [(i, s.energy) for i, s in enumerate(states)],
                note="spectrum of |a| (-d2/dr2) - |b| U(r); bound states lie in (-|b|, 0)")
    r = states[0].r
    keep = np.nonzero(np.abs(r) <= p["r_window"] * m.r_B)[0]
    keep = keep[::max(1, keep.size // 1000)]
    cols = [("r", "r_B")] + [(f"phi_{i}", "r_B^-1/2") for i in range(len(states))]
    data = [r[keep] / m.r_B] + [s.phi[keep] for s in states]
    funcs = Table("eigenfunctions.csv", cols, list(zip(*data)), "r", [c for c, _ in cols[1:]])
    kin, depth = rydberg.well_parameters(m)
    knobs = {"points_per_rB": p["points_per_rB"], "grid_points": int(r.size), "half_width": float(-r[0])}
    summary = {"count": len(states), "ground_energy": states[0].energy, "kinetic": kin, "depth": depth}
    return Outcome([eig, funcs], knobs, summary)


def run_blochCheck(p: dict, threads: int) -> Outcome:
    q = router3le.DrivenQubitParams(Gamma1=p["Gamma1"], Gamma_phi=p["Gamma_phi"], Omega=p["Omega"], r0=p["r0"])
    delta = np.linspace(p["delta_min"], p["delta_max"], p["n"])
    r_closed, _ = router3le.driven_qubit_steady_state(q, delta)
    r_solve, _ = router3le.bloch_steady_state_oracle(q, delta)
    diff = np.abs(r_closed - r_solve)
    rows = list(zip(delta, r_closed.real, r_closed.imag, r_solve.real, r_solve.imag, diff))
    table = Table("bloch_check.csv",
                  [("delta", "Gamma1"), ("re_r_closed_form", "1"), ("im_r_closed_form", "1"),
                   ("re_r_linear_solve", "1"), ("im_r_linear_solve", "1"), ("abs_difference", "1")],
                  rows, "delta", ["re_r_closed_form", "im_r_closed_form"])
    return Outcome([table], {"n": p["n"]}, {"max_abs_difference": float(diff.max())})


EXPERIMENTS: dict[str, Experiment] = {e.name: e for e in [
    Experiment("spectrum2le", "single-emitter reflection spectrum: Lorentzian R with HWHM Gamma, R(0)=1 when lossless",
               {"gamma": 0.0, "Gamma": 1.0, "delta_min": -5.0, "delta_max": 5.0, "n": 1001},
               run_spectrum2le),
    Experiment("twophoton2le", "two-photon outgoing amplitudes: transmitted cusp bunching, reflected antibunching at x=0",
               {"omega_e": 0.0, "Gamma": 1.0, "v_g": 1.0, "x_c": 0.0, "x_min": -5.0, "x_max": 5.0, "n": 1001},
               run_twophoton2le),
    Experiment("g2coherent", "weak coherent input g2(tau): bunching at Gamma/gamma=3, antibunching at 1.6, flat at 0.2",
               {"omega_e": 10.0, "gamma": 1.0, "Gamma": 3.0, "v_g": 1.0, "k0": 10.0, "Delta_k": 1.0,
                "tau_min": -5.0, "tau_max": 5.0, "n": 401},
               run_g2coherent),
    Experiment("router", "three-level router: EIT window and ATS doublet splitting = Omega_c within 10%",
               {"Gamma": 1.0, "gamma": 0.25, "gamma_s": 0.025, "Delta_c": -0.5,
                "Omega_c": [0.0, 0.5, 4.0, 8.0], "delta_min": -8.0, "delta_max": 8.0, "n": 1601},
               run_router),
    Experiment("latticeT", "tight-binding wavepacket oracle: |T_lattice - T_analytic| < 1e-2 at 11 detunings",
               {"J": 1.0, "Gamma": 0.1, "n_sites": 2048, "sigma_k": None, "dt": None,
                "clear_widths": lattice.CLEAR_WIDTHS, "snapshot": False,
                "detunings_over_Gamma": [-4.0, -3.2, -2.4, -1.6, -0.8, 0.0, 0.8, 1.6, 2.4, 3.2, 4.0]},
               run_latticeT),
    Experiment("latticeG2", "hard-core lattice two-photon scattering: TT peak and RR dip at zero separation",
               {"J": 1.0, "Gamma": 0.5, "n_sites": 256, "U": None, "sigma_k": None, "dt": None},
               run_latticeG2),
    Experiment("rydbergRun", "Rydberg two-photon propagation: g2(tau) and conditional phase in the dispersive regime",
               {"OD_B": 20.0, "L": 1.0, "Delta": 4.6, "Omega_c": 1.0, "gamma": 1.0, "r_B": 1.0,
                "n_points": rydberg.DEFAULT_POINTS, "half_width": rydberg.DEFAULT_HALF_WIDTH,
                "n_steps": None, "smoothing": None, "dissipative": False, "tau_window": 5.0, "n_tau": 401},
               run_rydbergRun),
    Experiment("rydbergBound", "Rydberg square-well bound states (finite-well matching condition oracle)",
               {"OD_B": 20.0, "L": 1.0, "Delta": 4.6, "Omega_c": 1.0, "gamma": 1.0, "r_B": 1.0,
                "points_per_rB": 400, "r_window": 5.0},
               run_rydbergBound),
    Experiment("blochCheck", "driven qubit steady state: closed-form r versus Bloch linear solve to 1e-8",
               {"Gamma1": 1.0, "Gamma_phi": 0.1, "Omega": 0.5, "r0": 1.0, "delta_min": -5.0, "delta_max": 5.0,
                "n": 201},
               run_blochCheck),
]}


# -- config handling ----------------------------------------------------------------

def _coerce(name: str, value, default):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"parameter {name!r} must be true or false")
        return value
    if isinstance(default, list):
        if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                  for v in value):
            raise ConfigError(f"parameter {name!r} must be a list of numbers")
        return [float(v) for v in value]
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"parameter {name!r} must be a number")
    if name in INTEGER_PARAMS:
        if float(value) != int(value):
            raise ConfigError(f"parameter {name!r} must be an integer")
        return int(value)
    return float(value)


def resolve_params(exp: Experiment, given: dict) -> dict:
    unknown = sorted(set(given) - set(exp.defaults))
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {exp.name}: {', '.join(unknown)}")
    params = dict(exp.defaults)
    for key, value in given.items():
        params[key] = _coerce(key, value, exp.defaults[key])
    return params


def load_config(path: Path, experiment: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if raw.get("experiment", experiment) != experiment:
        raise ConfigError(f"config is for {raw['experiment']!r}, not {experiment!r}")
    if not isinstance(raw.get("params", {}), dict):
        raise ConfigError("params must be a JSON object")
    if not isinstance(raw.get("seed", 0), int):
        raise ConfigError("seed must be an integer")
    if not isinstance(raw.get("emit_svg", False), bool):
        raise ConfigError("emit_svg must be true or false")
    return raw


def _versions() -> dict:
    return {"wqed": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _write_manifest(out_dir: Path, manifest: dict) -> Path:
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return path


def run(experiment: str, config_path: Path, out_dir: Path | None = None, threads: int = 1,
        svg: bool = False) -> tuple[int, dict]:
    """Run one experiment; returns (exit code, manifest)."""
    exp = EXPERIMENTS[experiment]
    cfg = load_config(config_path, experiment)
    params = resolve_params(exp, cfg.get("params", {}))
    np.random.seed(cfg.get("seed", 0))
    out_dir = Path(out_dir or cfg.get("output_dir") or os.environ.get("WQED_OUT") or "wqed_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    emit_svg = svg or cfg.get("emit_svg", False)

    manifest = {"experiment": experiment, "anchor": exp.anchor, "config": cfg, "params": params,
                "seed": cfg.get("seed", 0), "threads": threads, "versions": _versions()}
    t0 = time.perf_counter()
    try:
        outcome = exp.runner(params, threads)
    except (lattice.NormDriftError, lattice.BoundaryContaminationError) as exc:
        manifest.update({"status": "aborted", "exit_code": EXIT_ABORT, "error": str(exc),
                         "diagnostics": getattr(exc, "diagnostics", {}),
                         "wall_time_s": time.perf_counter() - t0})
        _write_manifest(out_dir, manifest)
        return EXIT_ABORT, manifest

    files = {}
    for table in outcome.tables:
        path = write_csv(out_dir / table.filename, experiment, table.columns, table.rows, table.note)
        files[table.filename] = sha256(path)
        if emit_svg and table.plot_x:
            names = [c for c, _ in table.columns]
            data = np.array(table.rows, dtype=float).reshape(-1, len(names))
            xi = names.index(table.plot_x)
            series = {n: data[:, names.index(n)] for n in table.plot_y}
            svg_name = Path(table.filename).with_suffix(".svg").name
            svg_plot(out_dir / svg_name, data[:, xi], series, table.plot_x, ", ".join(table.plot_y), experiment)
            files[svg_name] = sha256(out_dir / svg_name)
    manifest.update({"status": "ok", "exit_code": EXIT_OK, "files": files, "knobs": outcome.knobs,
                     "summary": outcome.summary, "wall_time_s": time.perf_counter() - t0})
    _write_manifest(out_dir, manifest)
    return EXIT_OK, manifest


def list_experiments() -> list[tuple[str, str, list[str]]]:
    return [(e.name, e.anchor, sorted(e.defaults)) for e in EXPERIMENTS.values()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wqed", description="Few-photon waveguide QED experiments")
    ap.add_argument("experiment", choices=["list", *EXPERIMENTS], help="experiment to run, or 'list'")
    ap.add_argument("--config", type=Path, help="JSON config file")
    ap.add_argument("--out", type=Path, default=None, help="output directory (default: $WQED_OUT)")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for independent sweep points")
    ap.add_argument("--svg", action="store_true", help="also write SVG plots")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.experiment == "list":
        for name, anchor, params in list_experiments():
            print(f"{name:<14} {anchor}")
            print(f"{'':<14} params: {', '.join(params)}")
        return EXIT_OK
    if args.config is None:
        print("error: --config is required", file=sys.stderr)
        return EXIT_INVALID
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        code, manifest = run(args.experiment, args.config, args.out, args.threads, args.svg)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if code == EXIT_ABORT:
        print(f"aborted: {manifest['error']}", file=sys.stderr)
    else:
        print(json.dumps(_jsonable(manifest["summary"]), sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
