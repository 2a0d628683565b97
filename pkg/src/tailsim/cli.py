"""Scenario runner: loads a config, runs maneuvers/sweeps/fits, writes CSV
trajectories and a flat key-value metrics summary.

Usage::

    tailsim run <config.toml> [--out DIR] [--dt S] [--quiet]
    tailsim report <metrics files or dirs ...> [--out FILE]

Exit codes: 0 success, 2 configuration or input errors, 3 numerical aborts.
On failure a machine-readable JSON error record goes to stderr (and to
``error.json`` in the output directory when one exists).  Bare config names
are also resolved against ``$TAILSIM_CONFIG_DIR``.

Direction naming maps to the bending-plane azimuth of the kinematics
convention: extension -90 deg (toward -Y, three driving actuators), flexion
+90 deg (toward +Y, two), waggle 0 / 180 deg (toward +-X).

Trajectory CSV schemas (floats printed with 17 significant digits):

* maneuver: ``t_s, phi_rad, theta_rad, phidot_rad_s, thetadot_rad_s,
  P1_pa..P5_pa, tau_base_Nm, f_base_N``
* cart: ``t_s, alpha_rad, beta_rad, alphadot_rad_s, betadot_rad_s, tau_Nm``
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fitting
from .actuation import PressureProfile
from .config import load_params
from .errors import (ConfigError, NoInput, NonFiniteState, NotConverged,
                     SingularInertia, TailsimError)
from .kinematics import point_motion, translation_jet
from .params import DynamicParams, JointGeometry, PlatformParams, SoaParams
from .simulate import (ManeuverSetup, Trajectory, base_reaction,
                       extract_metrics, simulate_platform, simulate_pulse)

DIRECTION_PHI = {
    "extension": -math.pi / 2.0,
    "flexion": math.pi / 2.0,
    "waggle": 0.0,
    "waggle_back": math.pi,
}

SCENARIO_KINDS = ("maneuver", "pressure_sweep", "mass_sweep", "cart",
                  "ballistic", "fit")

SCENARIO_KEYS = {
    "kind", "name", "direction", "peak_bar", "rise_time_s", "hold_s",
    "vacuum_bar", "duration_s", "dt_s", "target_angle_deg", "tip_mass_g",
    "pressures_bar", "tip_masses_g", "tilt_deg", "mount_height_m",
    "tau_amplitude_nm", "tau_frequency_hz", "trace_csv",
    "t0_min_s", "t0_max_s", "c_min", "c_max", "grid_size",
}

REQUIRED_BY_KIND = {
    "maneuver": {"peak_bar"},
    "pressure_sweep": {"pressures_bar"},
    "mass_sweep": {"peak_bar", "tip_masses_g"},
    "cart": set(),
    "ballistic": {"pressures_bar"},
    "fit": {"trace_csv"},
}


@dataclass(frozen=True)
class Scenario:
    """One runnable scenario: parameters plus maneuver settings."""

    kind: str
    name: str
    geom: JointGeometry
    soa: SoaParams
    dyn: DynamicParams
    platform: PlatformParams
    direction: str = "extension"
    peak_bar: float = 2.0
    rise_time_s: float = 0.04
    hold_s: float = 0.45
    vacuum_bar: float = -0.9
    duration_s: float = 0.45
    dt_s: float = 1e-4
    target_angle_deg: float = 38.0
    tip_mass_g: float = 0.0
    pressures_bar: tuple = ()
    tip_masses_g: tuple = ()
    tilt_deg: float = 40.0
    mount_height_m: float = 0.3
    tau_amplitude_nm: float | None = None
    tau_frequency_hz: float = 5.0
    trace_csv: str = ""
    t0_min_s: float = 5e-3
    t0_max_s: float = 0.2
    c_min: float = 0.0
    c_max: float = 500.0
    grid_size: int = 11

    @property
    def direction_phi(self) -> float:
        return DIRECTION_PHI[self.direction]

    def profile(self, peak_bar: float | None = None) -> PressureProfile:
        peak = (self.peak_bar if peak_bar is None else peak_bar) * 1e5
        return PressureProfile(peak=peak, rise_time=self.rise_time_s,
                               hold=self.hold_s, vacuum=self.vacuum_bar * 1e5)

    def setup(self, peak_bar: float | None = None,
              tip_mass_g: float | None = None) -> ManeuverSetup:
        tip = (self.tip_mass_g if tip_mass_g is None else tip_mass_g) * 1e-3
        return ManeuverSetup(self.geom, self.soa, self.dyn,
                             self.profile(peak_bar), self.direction_phi,
                             self.duration_s, self.dt_s, tip_mass=tip)


def load_scenario(path, dt_override: float | None = None) -> Scenario:
    """Parse and validate a scenario config file."""
    geom, soa, dyn, plat, table = load_params(path)
    unknown = sorted(set(table) - SCENARIO_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) in [scenario]: {', '.join(unknown)}")
    kind = table.get("kind", "maneuver")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"unknown scenario kind '{kind}'; expected one of "
                          + ", ".join(SCENARIO_KINDS))
    missing = REQUIRED_BY_KIND[kind] - set(table)
    if missing:
        raise ConfigError(f"[scenario] kind '{kind}' requires key(s): "
                          + ", ".join(sorted(missing)))
    direction = table.get("direction", "extension")
    if direction not in DIRECTION_PHI:
        raise ConfigError(f"unknown direction '{direction}'; expected one of "
                          + ", ".join(DIRECTION_PHI))
    fields = {k: table[k] for k in table if k not in ("kind", "name",
                                                      "direction")}
    for seq_key in ("pressures_bar", "tip_masses_g"):
        if seq_key in fields:
            fields[seq_key] = tuple(float(v) for v in fields[seq_key])
    if dt_override is not None:
        fields["dt_s"] = dt_override
    scn = Scenario(kind=kind, name=table.get("name", Path(path).stem),
                   geom=geom, soa=soa, dyn=dyn, platform=plat,
                   direction=direction, **fields)
    if scn.dt_s <= 0 or scn.duration_s < scn.dt_s:
        raise ConfigError("need dt_s > 0 and duration_s >= dt_s")
    prof_problems = scn.profile().violations(soa)
    if prof_problems:
        raise ConfigError("invalid pressure profile: "
                          + "; ".join(prof_problems))
    return scn


# ---------------------------------------------------------------------------
# CSV and metrics files.

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_trajectory_csv(path, traj: Trajectory, tau_base=None, f_base=None):
    """Emit a trajectory using the fixed column schemas above."""
    path = Path(path)
    if traj.kind == "maneuver":
        n_act = traj.inputs.shape[1]
        header = (["t_s", "phi_rad", "theta_rad", "phidot_rad_s",
                   "thetadot_rad_s"]
                  + [f"P{i + 1}_pa" for i in range(n_act)]
                  + ["tau_base_Nm", "f_base_N"])
        fmag = np.linalg.norm(np.atleast_2d(f_base), axis=1)
        cols = ([traj.times] + [traj.states[:, j] for j in range(4)]
                + [traj.inputs[:, j] for j in range(n_act)]
                + [np.asarray(tau_base), fmag])
    elif traj.kind == "cart":
        header = ["t_s", "alpha_rad", "beta_rad", "alphadot_rad_s",
                  "betadot_rad_s", "tau_Nm"]
        cols = ([traj.times] + [traj.states[:, j] for j in range(4)]
                + [traj.inputs[:, 0]])
    else:
        raise ValueError(f"no CSV schema for trajectory kind '{traj.kind}'")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(len(traj.times)):
            fh.write(",".join(_fmt(col[i]) for col in cols) + "\n")


def read_trajectory_csv(path) -> dict:
    """Re-parse an emitted CSV into named float columns (lossless)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array([[float(v) for v in row] for row in rows])
    if data.shape[1] != len(header):
        raise ValueError(f"ragged CSV {path}")
    return {name: data[:, j] for j, name in enumerate(header)}


def write_metrics(path, records: list[dict]):
    """Flat key-value metrics file, one scenario per blank-line record."""
    with open(path, "w") as fh:
        for rec in records:
            for key, value in rec.items():
                fh.write(f"{key} = {_fmt(value)}\n")
            fh.write("\n")


def parse_metrics(path) -> list[dict]:
    records = []
    current: dict = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                if current:
                    records.append(current)
                    current = {}
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if value in ("true", "false"):
                current[key] = value == "true"
            else:
                try:
                    current[key] = float(value)
                except ValueError:
                    current[key] = value
    if current:
        records.append(current)
    return records


# ---------------------------------------------------------------------------
# Scenario runners.  Sweep members are independent (no shared mutable
# state), so a batch scheduler may fan them out; they run sequentially here
# for determinism.

def _run_single_maneuver(scn: Scenario, peak_bar: float, tip_mass_g: float,
                         label: str, out_dir: Path, quiet: bool) -> dict:
    setup = scn.setup(peak_bar, tip_mass_g)
    traj = simulate_pulse(setup)
    tau, f = base_reaction(traj, setup.effective_dyn(), scn.geom, scn.soa,
                           tip_mass=setup.tip_mass)
    metrics = extract_metrics(traj, math.radians(scn.target_angle_deg),
                              tau_base=tau, f_base=f)
    csv_path = out_dir / f"{label}.csv"
    write_trajectory_csv(csv_path, traj, tau_base=tau, f_base=f)
    rec = {
        "scenario": label,
        "kind": "maneuver",
        "direction": scn.direction,
        "peak_bar": peak_bar,
        "tip_mass_g": tip_mass_g,
        "target_angle_deg": scn.target_angle_deg,
        "target_reached": metrics.t_settle is not None,
        "t_settle_s": metrics.t_settle if metrics.t_settle is not None
        else float("nan"),
        "v_peak_rad_s": metrics.v_peak,
        "v_peak_deg_s": metrics.v_peak_deg_s,
        "tau_peak_Nm": metrics.tau_peak,
        "f_peak_N": metrics.f_peak,
        "trajectory_csv": csv_path.name,
    }
    if not quiet:
        settle = (f"{metrics.t_settle * 1e3:.1f} ms"
                  if metrics.t_settle is not None else "never (reported)")
        print(f"{label}: t_settle={settle}  v_peak={metrics.v_peak_deg_s:.0f} "
              f"deg/s  tau_peak={metrics.tau_peak:.3f} Nm")
    return rec


def run_maneuver(scn, out_dir, quiet):
    return [_run_single_maneuver(scn, scn.peak_bar, scn.tip_mass_g, scn.name,
                                 out_dir, quiet)]


def run_pressure_sweep(scn, out_dir, quiet):
    return [_run_single_maneuver(scn, bar, scn.tip_mass_g,
                                 f"{scn.name}_{bar:g}bar", out_dir, quiet)
            for bar in scn.pressures_bar]


def run_mass_sweep(scn, out_dir, quiet):
    return [_run_single_maneuver(scn, scn.peak_bar, grams,
                                 f"{scn.name}_{grams:g}g", out_dir, quiet)
            for grams in scn.tip_masses_g]


def run_cart(scn, out_dir, quiet):
    if scn.tau_amplitude_nm is not None:
        omega = 2.0 * math.pi * scn.tau_frequency_hz
        amp = scn.tau_amplitude_nm
        tau_of_t = lambda t: amp * math.sin(omega * t)
        source = "prescribed"
    else:
        setup = scn.setup()
        traj = simulate_pulse(setup)
        tau_series, _ = base_reaction(traj, setup.effective_dyn(), scn.geom,
                                      scn.soa, tip_mass=setup.tip_mass)
        times = traj.times
        tau_of_t = lambda t: float(np.interp(t, times, tau_series))
        source = "tail_pulse"
    ptraj = simulate_platform(scn.platform, tau_of_t, np.zeros(4),
                              scn.duration_s, scn.dt_s)
    csv_path = out_dir / f"{scn.name}.csv"
    write_trajectory_csv(csv_path, ptraj)
    alpha = ptraj.states[:, 0]
    accels = ptraj.derivs[:, 2:4]
    moving = np.flatnonzero(np.abs(accels[:, 1]) > 1e-9)
    opposite = False
    if moving.size:
        i = int(moving[0])
        tail_physical = accels[i, 0] - accels[i, 1]
        opposite = bool(accels[i, 0] * tail_physical < 0.0)
    rec = {
        "scenario": scn.name,
        "kind": "cart",
        "torque_source": source,
        "peak_bar": scn.peak_bar,
        "alpha_min_deg": math.degrees(float(np.min(alpha))),
        "alpha_max_deg": math.degrees(float(np.max(alpha))),
        "cart_opposite_to_tail": opposite,
        "trajectory_csv": csv_path.name,
    }
    if not quiet:
        print(f"{scn.name}: cart excursion "
              f"[{rec['alpha_min_deg']:.2f}, {rec['alpha_max_deg']:.2f}] deg, "
              f"opposite={opposite}")
    return [rec]


def shot_distance(scn: Scenario, peak_bar: float) -> float:
    """Drag-free range of a ball released at peak tip speed.

    The mount is tilted ``tilt_deg`` from vertical toward the throw; the
    release point sits ``mount_height_m`` above the ground.
    """
    setup = scn.setup(peak_bar)
    traj = simulate_pulse(setup)
    arc = scn.dyn.arc_length
    e_phi = np.array([math.cos(scn.direction_phi),
                      math.sin(scn.direction_phi), 0.0])
    best = (0.0, None, None)
    for i in range(len(traj.times)):
        phi, th, dphi, dth = traj.states[i]
        jet = translation_jet(phi, th, arc)
        vel, _ = point_motion(jet, (dphi, dth),
                              (traj.derivs[i, 2], traj.derivs[i, 3]))
        speed = float(np.linalg.norm(vel))
        if speed > best[0]:
            best = (speed, jet[0], vel)
    _, tip, vel = best
    chi = math.radians(scn.tilt_deg)
    # World frame: x horizontal toward the throw, y up.  The mount axis maps
    # to (sin chi, cos chi) and the bending direction to (cos chi, -sin chi).
    v_par, v_ax = float(vel @ e_phi), float(vel[2])
    p_par, p_ax = float(tip @ e_phi), float(tip[2])
    vx = v_par * math.cos(chi) + v_ax * math.sin(chi)
    vy = -v_par * math.sin(chi) + v_ax * math.cos(chi)
    h0 = scn.mount_height_m - p_par * math.sin(chi) + p_ax * math.cos(chi)
    g = 9.81
    if vx <= 0.0 or h0 <= 0.0:
        return 0.0
    return vx / g * (vy + math.sqrt(vy * vy + 2.0 * g * max(h0, 0.0)))


def run_ballistic(scn, out_dir, quiet):
    records = []
    for bar in scn.pressures_bar:
        dist = shot_distance(scn, bar)
        records.append({
            "scenario": f"{scn.name}_{bar:g}bar",
            "kind": "ballistic",
            "peak_bar": bar,
            "tilt_deg": scn.tilt_deg,
            "shot_distance_m": dist,
        })
        if not quiet:
            print(f"{scn.name} @ {bar:g} bar: shot distance {dist:.3f} m")
    return records


def run_fit(scn, out_dir, quiet):
    trace_path = Path(scn.trace_csv)
    try:
        cols = read_trajectory_csv(trace_path)
    except FileNotFoundError:
        raise ConfigError(f"trace file not found: {trace_path}") from None
    if "time_s" not in cols or "torque_Nm" not in cols:
        raise ConfigError("fit trace needs columns time_s, torque_Nm")
    result = fitting.fit_damping_rise(
        cols["time_s"], cols["torque_Nm"], scn.setup(),
        t0_bounds=(scn.t0_min_s, scn.t0_max_s),
        c_bounds=(scn.c_min, scn.c_max), grid_size=scn.grid_size)
    rec = {
        "scenario": scn.name,
        "kind": "fit",
        "rise_time_s": result.params["rise_time"],
        "c_damp_ns_per_m": result.params["c_damp"],
        "rmse_Nm": result.rmse,
        "iterations": result.iterations,
        "converged": result.converged,
    }
    if not quiet:
        print(f"{scn.name}: rise_time={rec['rise_time_s'] * 1e3:.2f} ms  "
              f"c_damp={rec['c_damp_ns_per_m']:.2f}  rmse={rec['rmse_Nm']:.3e}")
    return [rec]


RUNNERS = {
    "maneuver": run_maneuver,
    "pressure_sweep": run_pressure_sweep,
    "mass_sweep": run_mass_sweep,
    "cart": run_cart,
    "ballistic": run_ballistic,
    "fit": run_fit,
}


def run(config_path, out_dir, dt_override=None, quiet=False) -> Path:
    """Execute one scenario file; returns the metrics file path."""
    scn = load_scenario(config_path, dt_override)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = RUNNERS[scn.kind](scn, out_dir, quiet)
    metrics_path = out_dir / f"{scn.name}_metrics.txt"
    write_metrics(metrics_path, records)
    if not quiet:
        print(f"metrics written to {metrics_path}")
    return metrics_path


# ---------------------------------------------------------------------------
# Reporting.

def _collect_metric_files(paths) -> list[Path]:
    files = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*_metrics.txt")))
        elif p.exists():
            files.append(p)
        else:
            raise NoInput(f"no such metrics file: {p}")
    if not files:
        raise NoInput("no metrics files found")
    return files


def report(paths) -> list[dict]:
    """Merge metrics files and append fitted trend rows.

    Maneuver records spanning at least three pressures get power-law fits
    of settle time and peak velocity versus pressure and a linear fit of
    peak torque; ballistic records get a linear shot-distance fit.
    """
    records = []
    for path in _collect_metric_files(paths):
        records.extend(parse_metrics(path))
    merged = list(records)

    sweeps = [r for r in records if r.get("kind") == "maneuver"
              and "peak_bar" in r]
    pressures = sorted({r["peak_bar"] for r in sweeps})
    if len(pressures) >= 3:
        by_p = {p: next(r for r in sweeps if r["peak_bar"] == p)
                for p in pressures}
        xs = np.array(pressures)
        settles = np.array([by_p[p].get("t_settle_s", float("nan"))
                            for p in pressures])
        if np.all(np.isfinite(settles)) and np.all(settles > 0):
            a, b = fitting.fit_power_law(xs, settles)
            merged.append({"scenario": "trend", "kind": "power_law",
                           "quantity": "t_settle_s", "coefficient": a,
                           "exponent": b})
        vels = np.array([by_p[p]["v_peak_deg_s"] for p in pressures])
        a, b = fitting.fit_power_law(xs, vels)
        merged.append({"scenario": "trend", "kind": "power_law",
                       "quantity": "v_peak_deg_s", "coefficient": a,
                       "exponent": b})
        taus = np.array([by_p[p]["tau_peak_Nm"] for p in pressures])
        slope, intercept, r2 = fitting.fit_linear(xs, taus)
        merged.append({"scenario": "trend", "kind": "linear",
                       "quantity": "tau_peak_Nm", "slope": slope,
                       "intercept": intercept, "r_squared": r2})

    shots = [r for r in records if r.get("kind") == "ballistic"]
    if len(shots) >= 2:
        xs = np.array([r["peak_bar"] for r in shots])
        ys = np.array([r["shot_distance_m"] for r in shots])
        if np.ptp(xs) > 0:
            slope, intercept, r2 = fitting.fit_linear(xs, ys)
            merged.append({"scenario": "trend", "kind": "linear",
                           "quantity": "shot_distance_m", "slope": slope,
                           "intercept": intercept, "r_squared": r2})
    return merged


# ---------------------------------------------------------------------------
# Entry point.

def _resolve_config(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    base = os.environ.get("TAILSIM_CONFIG_DIR")
    if base:
        for cand in (Path(base) / name, Path(base) / f"{name}.toml"):
            if cand.exists():
                return cand
    raise ConfigError(f"config file not found: {name}")


def _emit_error(exc: Exception, out_dir) -> None:
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)
    try:
        out = Path(out_dir)
        if out.is_dir():
            with open(out / "error.json", "w") as fh:
                json.dump(record, fh, indent=2)
                fh.write("\n")
    except OSError:
        pass


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tailsim",
        description="Soft robotic tail scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", help="scenario TOML file (or bare name "
                       "resolved via $TAILSIM_CONFIG_DIR)")
    p_run.add_argument("--out", default="tailsim_out",
                       help="output directory (default: tailsim_out)")
    p_run.add_argument("--dt", type=float, default=None,
                       help="override integration step [s]")
    p_run.add_argument("--quiet", action="store_true")

    p_rep = sub.add_parser("report", help="merge metrics files, fit trends")
    p_rep.add_argument("inputs", nargs="+",
                       help="metrics files or directories")
    p_rep.add_argument("--out", default=None,
                       help="write the merged table here (default: stdout)")
    p_rep.add_argument("--quiet", action="store_true")

    args = parser.parse_args(argv)

    if args.command == "run":
        try:
            config = _resolve_config(args.config)
            run(config, args.out, dt_override=args.dt, quiet=args.quiet)
        except (ConfigError, NoInput, NotConverged) as exc:
            _emit_error(exc, args.out)
            return 2
        except (NonFiniteState, SingularInertia, FloatingPointError) as exc:
            _emit_error(exc, args.out)
            return 3
        return 0

    if args.command == "report":
        try:
            merged = report(args.inputs)
        except (NoInput, ConfigError) as exc:
            _emit_error(exc, None)
            return 2
        if args.out:
            write_metrics(args.out, merged)
            if not args.quiet:
                print(f"report written to {args.out}")
        else:
            for rec in merged:
                for key, value in rec.items():
                    print(f"{key} = {_fmt(value)}")
                print()
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
