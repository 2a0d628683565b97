"""Parameter identification and trend fits.

Three fitters:

* :func:`fit_damping_rise` recovers the pressure rise time and the actuator
  damping coefficient by minimizing the RMS error between a measured base
  torque trace and the simulated one.  Coarse grid first (the objective
  requires a full simulation per point and can have shallow side valleys),
  then a Nelder-Mead refinement; derivative-free because each evaluation is
  a simulation.
* :func:`fit_power_law` for time/velocity versus pressure trends.
* :func:`fit_linear` for peak torque versus pressure or added mass.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateAbscissa, NonPositiveData, NotConverged
from .simulate import ManeuverSetup, base_reaction, simulate_pulse

RISE_TIME_SCALE = 0.1
DAMPING_SCALE = 100.0


def _nelder_mead(fun, x0, bounds, xtol: float, max_iter: int):
    """Bounded Nelder-Mead on a 2-D objective.

    Terminates when the simplex diameter falls below ``xtol`` (coordinates
    are expected pre-scaled to order one); raises :class:`NotConverged`
    when the diameter fails to shrink that far within ``max_iter``
    iterations.  Standard reflection/expansion/contraction/shrink moves
    with projection onto the box.
    """
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    def clip(x):
        return np.minimum(np.maximum(x, lo), hi)

    n = len(x0)
    simplex = [np.array(x0, dtype=float)]
    for i in range(n):
        step = 0.05 * max(abs(x0[i]), 0.1)
        vertex = np.array(x0, dtype=float)
        vertex[i] += step if vertex[i] + step <= hi[i] else -step
        simplex.append(clip(vertex))
    values = [fun(v) for v in simplex]
    evals = len(simplex)

    for iteration in range(max_iter):
        order = np.argsort(values)
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        diameter = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        if diameter < xtol:
            return np.array(simplex[0]), values[0], iteration, evals
        centroid = np.mean(simplex[:-1], axis=0)
        reflected = clip(centroid + (centroid - simplex[-1]))
        f_ref = fun(reflected)
        evals += 1
        if f_ref < values[0]:
            expanded = clip(centroid + 2.0 * (centroid - simplex[-1]))
            f_exp = fun(expanded)
            evals += 1
            if f_exp < f_ref:
                simplex[-1], values[-1] = expanded, f_exp
            else:
                simplex[-1], values[-1] = reflected, f_ref
        elif f_ref < values[-2]:
            simplex[-1], values[-1] = reflected, f_ref
        else:
            contracted = clip(centroid + 0.5 * (simplex[-1] - centroid))
            f_con = fun(contracted)
            evals += 1
            if f_con < values[-1]:
                simplex[-1], values[-1] = contracted, f_con
            else:
                for i in range(1, len(simplex)):
                    simplex[i] = clip(simplex[0]
                                      + 0.5 * (simplex[i] - simplex[0]))
                    values[i] = fun(simplex[i])
                evals += n
    raise NotConverged(
        f"simplex diameter failed to shrink below {xtol:g} within "
        f"{max_iter} iterations")


@dataclass(frozen=True)
class FitResult:
    """Outcome of one identification run."""

    params: dict
    rmse: float
    iterations: int
    converged: bool


def simulated_torque(setup: ManeuverSetup, rise_time: float,
                     c_damp: float) -> tuple[np.ndarray, np.ndarray]:
    """Base torque trace of the pulse scenario at the given (t0, c)."""
    trial = replace(
        setup,
        profile=replace(setup.profile, rise_time=rise_time),
        soa=replace(setup.soa, c_damp=c_damp),
    )
    traj = simulate_pulse(trial)
    torque, _ = base_reaction(traj, trial.effective_dyn(), trial.geom,
                              trial.soa, tip_mass=0.0)
    return traj.times, torque


def fit_damping_rise(times, torques, setup: ManeuverSetup,
                     t0_bounds=(5e-3, 0.2), c_bounds=(0.0, 500.0),
                     grid_size: int = 11, max_iter: int = 400,
                     xtol: float = 1e-6) -> FitResult:
    """Identify (rise_time, c_damp) from a base torque trace.

    ``times``/``torques`` are the measured trace; the simulated torque is
    interpolated onto the measurement instants before the RMS error is
    taken (units N m).  Coarse grid first, then the bounded simplex on
    coordinates scaled to order one (``xtol`` is the scaled simplex
    diameter at termination).  The grid stage is an embarrassingly
    parallel scan kept sequential here; evaluations are deterministic, so
    repeated fits agree bit-exactly.
    """
    times = np.asarray(times, dtype=float)
    torques = np.asarray(torques, dtype=float)
    if times.ndim != 1 or times.size < 4 or times.shape != torques.shape:
        raise ValueError("need matching 1-D time and torque arrays")
    if times[-1] < setup.profile.rise_time:
        raise ValueError("trace must cover the pressure pulse")

    evaluations = 0

    def objective_raw(rise_time: float, c_damp: float) -> float:
        nonlocal evaluations
        evaluations += 1
        sim_t, sim_tau = simulated_torque(setup, rise_time, c_damp)
        model = np.interp(times, sim_t, sim_tau)
        return float(np.sqrt(np.mean((model - torques) ** 2)))

    t0s = np.linspace(t0_bounds[0], t0_bounds[1], grid_size)
    cs = np.linspace(c_bounds[0], c_bounds[1], grid_size)
    best = (float("inf"), t0s[0], cs[0])
    for t0 in t0s:
        for c in cs:
            val = objective_raw(t0, c)
            if val < best[0]:
                best = (val, t0, c)

    def objective_scaled(z) -> float:
        return objective_raw(z[0] * RISE_TIME_SCALE, z[1] * DAMPING_SCALE)

    z0 = np.array([best[1] / RISE_TIME_SCALE, best[2] / DAMPING_SCALE])
    bounds = [(t0_bounds[0] / RISE_TIME_SCALE, t0_bounds[1] / RISE_TIME_SCALE),
              (c_bounds[0] / DAMPING_SCALE, c_bounds[1] / DAMPING_SCALE)]
    z_best, f_best, iterations, _ = _nelder_mead(objective_scaled, z0,
                                                 bounds, xtol, max_iter)
    return FitResult(
        params={"rise_time": float(z_best[0] * RISE_TIME_SCALE),
                "c_damp": float(z_best[1] * DAMPING_SCALE)},
        rmse=float(f_best),
        iterations=evaluations,
        converged=True,
    )


def fit_power_law(xs, ys) -> tuple[float, float]:
    """Least-squares fit of y = a x^b on log-log transformed data.

    Exact (to rounding) on noise-free power-law samples.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("need at least three samples")
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise NonPositiveData("power-law fitting needs positive data")
    exponent, log_coef = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(np.exp(log_coef)), float(exponent)


def fit_linear(xs, ys) -> tuple[float, float, float]:
    """Ordinary least squares line fit; returns (slope, intercept, r^2)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2:
        raise ValueError("need at least two samples")
    if np.ptp(xs) == 0.0:
        raise DegenerateAbscissa("all abscissa values are equal")
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys - (slope * xs + intercept)
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-300 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
