"""Time integration, maneuver drivers, metrics, and reaction wrenches.

Integration is classical fixed-step fourth-order Runge-Kutta: deterministic,
so identical inputs give bit-identical trajectories.  The state derivative
at every accepted sample is stored alongside the state (it is the first
Runge-Kutta stage, plus one extra evaluation at the final sample), so
accelerations never have to be re-differenced from the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import actuation, joint_dynamics, kinematics
from .actuation import PressureProfile
from .errors import NonFiniteState
from .kinematics import JointConfig
from .params import DynamicParams, JointGeometry, SoaParams, derive_anchors
from .platform import PlatformParams, platform_rhs


@dataclass(frozen=True)
class Trajectory:
    """Sampled states, inputs, and state derivatives of one simulation.

    ``states`` rows follow ``columns``; ``derivs`` holds the time derivative
    of the state at the same instants, so for second-order systems the
    acceleration columns are ``derivs[:, d:]``.
    """

    times: np.ndarray            # (N,), strictly increasing
    states: np.ndarray           # (N, d)
    inputs: np.ndarray | None    # (N, m) applied pressures or torques
    derivs: np.ndarray           # (N, d)
    columns: tuple[str, ...]
    kind: str = "generic"

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        same_inputs = ((self.inputs is None and other.inputs is None)
                       or (self.inputs is not None and other.inputs is not None
                           and np.array_equal(self.inputs, other.inputs)))
        return (self.kind == other.kind and self.columns == other.columns
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.states, other.states)
                and np.array_equal(self.derivs, other.derivs)
                and same_inputs)


@dataclass(frozen=True)
class MotionMetrics:
    """Summary numbers of one maneuver.

    ``t_settle`` is None when the target angle is never crossed (the
    condition is reported rather than raised, and the other metrics remain
    valid).
    """

    t_settle: float | None
    v_peak: float        # peak |theta_dot| [rad/s]
    tau_peak: float      # peak |base torque| [N m]
    f_peak: float        # peak base force magnitude [N]

    @property
    def v_peak_deg_s(self) -> float:
        return math.degrees(self.v_peak)


def integrate(rhs, y0, duration: float, dt: float, t0: float = 0.0):
    """Fixed-step RK4; returns (times, states, derivs).

    Raises :class:`NonFiniteState` (with the offending time) if a step
    produces a non-finite component.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if duration < dt:
        raise ValueError("duration must be at least dt")
    n_steps = int(round(duration / dt))
    y = np.array(y0, dtype=float)
    d = y.size
    times = t0 + dt * np.arange(n_steps + 1)
    states = np.empty((n_steps + 1, d))
    derivs = np.empty((n_steps + 1, d))
    states[0] = y
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(n_steps):
        t = times[i]
        k1 = rhs(t, y)
        k2 = rhs(t + half, y + half * k1)
        k3 = rhs(t + half, y + half * k2)
        k4 = rhs(t + dt, y + dt * k3)
        derivs[i] = k1
        y = y + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(
                f"non-finite state at t = {times[i + 1]:.6g} s",
                time=float(times[i + 1]))
        states[i + 1] = y
    derivs[n_steps] = rhs(times[n_steps], y)
    return times, states, derivs


# ---------------------------------------------------------------------------
# Pressure-pulse maneuver of a single lumped joint/segment.

JOINT_COLUMNS = ("phi_rad", "theta_rad", "phidot_rad_s", "thetadot_rad_s")
PLATFORM_COLUMNS = ("alpha_rad", "beta_rad", "alphadot_rad_s",
                    "betadot_rad_s")


@dataclass(frozen=True)
class ManeuverSetup:
    """Everything needed to run one pressure-pulse maneuver."""

    geom: JointGeometry
    soa: SoaParams
    dyn: DynamicParams
    profile: PressureProfile
    direction_phi: float      # bending-plane azimuth being driven [rad]
    duration: float
    dt: float
    tip_mass: float = 0.0     # added distal point mass [kg]

    def effective_dyn(self) -> DynamicParams:
        """Lumped parameters with the tip mass folded in.

        The point mass sits one half-length from the lumped centre of mass
        in the straight configuration, hence the (L/2)^2 inertia estimate.
        """
        if self.tip_mass == 0.0:
            return self.dyn
        extra_i = self.tip_mass * (self.dyn.arc_length / 2.0) ** 2
        return replace(self.dyn, mass=self.dyn.mass + self.tip_mass,
                       inertia=self.dyn.inertia + extra_i)


def make_joint_rhs(setup: ManeuverSetup):
    """Fast state-derivative closure for y = (phi, theta, phidot, thetadot).

    Evaluates the same model as :mod:`tailsim.joint_dynamics`, restated with
    scalar math so a full identification run stays cheap.  Cross-checked
    against the reference evaluators in the test suite.
    """
    geom, soa = setup.geom, setup.soa
    dyn = setup.effective_dyn()
    anchors = derive_anchors(geom)
    xy = kinematics._anchor_offsets(anchors)
    mask = actuation.drive_mask(anchors, setup.direction_phi).astype(float)
    prof = setup.profile

    # Plain-float locals: this closure runs four times per integration step,
    # so the anchor loop is written scalar style.
    ax = [float(v) for v in xy[:, 0]]
    ay = [float(v) for v in xy[:, 1]]
    driven = [bool(v) for v in mask]
    n_anchors = len(ax)
    L = geom.arc_length
    ml2 = dyn.mass * dyn.arc_length ** 2
    inertia = dyn.inertia
    rod_k = dyn.bending_stiffness
    mgl = dyn.mass * dyn.gravity * dyn.arc_length
    area, m_coef, n_coef = soa.area, soa.m_coef, soa.n_coef
    c_damp = soa.c_damp
    per_anchor = soa.per_anchor_lever
    uniform_arm = soa.lever_arm
    h = kinematics.JACOBIAN_STEP
    inv2h = 0.5 / h

    chord = kinematics._chord_scale
    mshape_phi = joint_dynamics._mass_shape_phi
    mshape_th = joint_dynamics._mass_shape_theta
    mshape_phi_p = joint_dynamics._mass_shape_phi_prime
    cshape_th = joint_dynamics._coriolis_shape_theta
    gshape = joint_dynamics._gravity_shape
    pressure_at = actuation.pressure_at
    cos, sin = math.cos, math.sin

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        phi = float(y[0])
        theta = float(y[1])
        dphi = float(y[2])
        dtheta = float(y[3])
        p_drive = pressure_at(t, prof)

        cph, sph = cos(phi), sin(phi)
        cph_hi, sph_hi = cos(phi + h), sin(phi + h)
        cph_lo, sph_lo = cos(phi - h), sin(phi - h)
        ch0 = chord(theta)
        th_hi, th_lo = theta + h, theta - h
        ch_hi, ch_lo = chord(th_hi), chord(th_lo)

        k_phi = 0.0
        k_th = 0.0
        d_phi = 0.0
        d_th = 0.0
        for i in range(n_anchors):
            xi, yi = ax[i], ay[i]
            u0 = xi * cph + yi * sph
            l0 = abs(L - u0 * theta) * ch0
            # Central differences of the closed-form length in phi and theta.
            jphi = (abs(L - (xi * cph_hi + yi * sph_hi) * theta)
                    - abs(L - (xi * cph_lo + yi * sph_lo) * theta)) \
                * ch0 * inv2h
            jth = (abs(L - u0 * th_hi) * ch_hi
                   - abs(L - u0 * th_lo) * ch_lo) * inv2h
            pi = p_drive if driven[i] else 0.0
            force = pi * area - (m_coef * pi + n_coef) * (l0 - L)
            arm = abs(u0) if per_anchor else uniform_arm
            w = arm * force
            k_phi += jphi * w
            k_th += jth * w
            dw = c_damp * arm * (jphi * dphi + jth * dtheta)
            d_phi += jphi * dw
            d_th += jth * dw
        k_th -= rod_k * theta

        m11 = inertia + ml2 * mshape_phi(theta)
        m22 = 0.25 * inertia + ml2 * mshape_th(theta)
        ap = mshape_phi_p(theta)
        c1 = ml2 * ap * dphi * dtheta
        c2 = (ml2 * cshape_th(theta) * dtheta * dtheta
              - 0.5 * ml2 * ap * dphi * dphi)
        g2 = mgl * gshape(theta)

        return np.array([
            dphi,
            dtheta,
            (k_phi - c1 - d_phi) / m11,
            (k_th - c2 - d_th - g2) / m22,
        ])

    return rhs, mask


def simulate_pulse(setup: ManeuverSetup) -> Trajectory:
    """Integrate one pressure-pulse maneuver from the straight rest state."""
    rhs, mask = make_joint_rhs(setup)
    y0 = np.array([setup.direction_phi, 0.0, 0.0, 0.0])
    times, states, derivs = integrate(rhs, y0, setup.duration, setup.dt)
    pressures = np.array([actuation.pressure_at(t, setup.profile) * mask
                          for t in times])
    return Trajectory(times, states, pressures, derivs,
                      columns=JOINT_COLUMNS, kind="maneuver")


def simulate_platform(params: PlatformParams, tau_of_t,
                      initial: np.ndarray, duration: float,
                      dt: float) -> Trajectory:
    """Integrate the hinged cart-tail system under a torque history."""
    rhs = platform_rhs(tau_of_t, params)
    times, states, derivs = integrate(rhs, initial, duration, dt)
    torques = np.array([[tau_of_t(t)] for t in times])
    return Trajectory(times, states, torques, derivs,
                      columns=PLATFORM_COLUMNS, kind="cart")


# ---------------------------------------------------------------------------
# Metrics and reaction wrenches.

def extract_metrics(traj: Trajectory, target_angle: float,
                    tau_base=None, f_base=None) -> MotionMetrics:
    """Settle time, peak speed, and (when supplied) peak reaction loads.

    ``t_settle`` is the first crossing of ``target_angle`` by the bending
    angle, located by linear interpolation between samples; appending
    post-settling samples cannot change it.
    """
    if len(traj.times) == 0:
        raise ValueError("empty trajectory")
    theta = traj.states[:, 1]
    v_peak = float(np.max(np.abs(traj.states[:, 3])))
    sign = 1.0 if target_angle >= 0.0 else -1.0
    reached = sign * theta >= sign * target_angle
    t_settle = None
    idx = np.flatnonzero(reached)
    if idx.size:
        i = int(idx[0])
        if i == 0:
            t_settle = float(traj.times[0])
        else:
            th0, th1 = theta[i - 1], theta[i]
            frac = (target_angle - th0) / (th1 - th0)
            t_settle = float(traj.times[i - 1]
                             + frac * (traj.times[i] - traj.times[i - 1]))
    tau_peak = float(np.max(np.abs(tau_base))) if tau_base is not None else 0.0
    f_peak = float(np.max(np.linalg.norm(np.atleast_2d(f_base), axis=1))) \
        if f_base is not None else 0.0
    return MotionMetrics(t_settle, v_peak, tau_peak, f_peak)


def base_reaction(traj: Trajectory, dyn: DynamicParams, geom: JointGeometry,
                  soa: SoaParams, tip_mass: float = 0.0, gravity_vec=None):
    """Reaction wrench the bending body exerts on its mount.

    The lumped body is the chord pendulum: mass at the chord midpoint,
    rotary inertia about its centre.  For every sample the reaction force is
    m (a_com - g) and the bending-axis torque collects the moment of that
    force about the base plus the rotary term I domega/dt; an optional tip
    point mass contributes its own terms.  Returns ``(torque, force)`` with
    ``torque`` the signed bending-axis component (N,) and ``force`` the full
    reaction (N, 3).

    Accelerations come from the derivatives stored at integration time.
    """
    if traj.kind != "maneuver":
        raise ValueError("base_reaction expects a maneuver trajectory")
    if gravity_vec is None:
        gravity_vec = np.array([0.0, 0.0, -dyn.gravity])
    else:
        gravity_vec = np.asarray(gravity_vec, dtype=float)
    L = dyn.arc_length
    phi = traj.states[:, 0]
    theta = traj.states[:, 1]
    dphi = traj.states[:, 2]
    dtheta = traj.states[:, 3]
    aphi = traj.derivs[:, 2]
    atheta = traj.derivs[:, 3]

    f1, f2, f1p, f2p, f1pp, f2pp = kinematics.shape_arrays(theta)
    cph, sph = np.cos(phi), np.sin(phi)
    zero = np.zeros_like(phi)

    def stack(a, b, c):
        return np.stack([a, b, c], axis=1)

    tip = L * stack(f1 * cph, f1 * sph, f2)
    t_ph = L * stack(-f1 * sph, f1 * cph, zero)
    t_th = L * stack(f1p * cph, f1p * sph, f2p)
    t_phph = L * stack(-f1 * cph, -f1 * sph, zero)
    t_phth = L * stack(-f1p * sph, f1p * cph, zero)
    t_thth = L * stack(f1pp * cph, f1pp * sph, f2pp)
    dphi_c = dphi[:, None]
    dth_c = dtheta[:, None]
    tip_acc = (t_ph * aphi[:, None] + t_th * atheta[:, None]
               + t_phph * dphi_c * dphi_c + 2.0 * t_phth * dphi_c * dth_c
               + t_thth * dth_c * dth_c)
    com = 0.5 * tip
    com_acc = 0.5 * tip_acc

    force = dyn.mass * (com_acc - gravity_vec)
    tau_vec = np.cross(com, force)

    # Rotary part: body spin omega = dphi (z - u) + (dtheta/2) n with u the
    # chord axis and n the bending axis.
    sh, chh = np.sin(0.5 * theta), np.cos(0.5 * theta)
    u = stack(sh * cph, sh * sph, chh)
    u_dot = (stack(-sh * sph, sh * cph, zero) * dphi_c
             + 0.5 * stack(chh * cph, chh * sph, -sh) * dth_c)
    n_axis = stack(-sph, cph, zero)
    n_dot = -dphi_c * stack(cph, sph, zero)
    z_minus_u = stack(-sh * cph, -sh * sph, 1.0 - chh)
    omega_dot = (aphi[:, None] * z_minus_u - dphi_c * u_dot
                 + 0.5 * atheta[:, None] * n_axis + 0.5 * dth_c * n_dot)
    tau_vec = tau_vec + dyn.inertia * omega_dot

    if tip_mass:
        f_tip = tip_mass * (tip_acc - gravity_vec)
        force = force + f_tip
        tau_vec = tau_vec + np.cross(tip, f_tip)

    torque = np.einsum("ij,ij->i", tau_vec, n_axis)
    return torque, force


def energy_series(traj: Trajectory, dyn: DynamicParams, geom: JointGeometry,
                  soa: SoaParams) -> np.ndarray:
    """Unpressurized mechanical energy at every sample (audit helper)."""
    anchors = derive_anchors(geom)
    out = np.empty(len(traj.times))
    for i in range(len(traj.times)):
        phi, theta, dphi, dtheta = traj.states[i]
        state = joint_dynamics.JointState(JointConfig(phi, theta),
                                          (dphi, dtheta))
        out[i] = joint_dynamics.joint_energy(state, dyn, geom, soa, anchors)
    return out
