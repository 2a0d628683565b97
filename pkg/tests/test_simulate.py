import math
from dataclasses import replace

import numpy as np
import pytest

from tailsim.actuation import PressureProfile
from tailsim.errors import NonFiniteState
from tailsim.kinematics import JointConfig
from tailsim.params import SoaParams
from tailsim.simulate import (JOINT_COLUMNS, ManeuverSetup, Trajectory,
                              base_reaction, energy_series, extract_metrics,
                              integrate, make_joint_rhs, simulate_pulse)

QUIET = PressureProfile(peak=0.0, rise_time=0.04, hold=0.1, vacuum=0.0)


def make_traj(times, theta, thetadot, kind="maneuver"):
    n = len(times)
    states = np.zeros((n, 4))
    states[:, 1] = theta
    states[:, 3] = thetadot
    derivs = np.zeros((n, 4))
    return Trajectory(np.asarray(times, float), states, None, derivs,
                      columns=JOINT_COLUMNS, kind=kind)


class TestIntegrator:
    def test_zero_dynamics_constant(self):
        times, states, derivs = integrate(lambda t, y: np.zeros(2),
                                          [1.0, -2.0], 1.0, 0.01)
        assert np.all(states == [1.0, -2.0])
        assert np.all(derivs == 0.0)

    def test_harmonic_oscillator_amplitude(self):
        period = 2.0 * math.pi
        dt = 1e-4 * period
        rhs = lambda t, y: np.array([y[1], -y[0]])
        times, states, _ = integrate(rhs, [1.0, 0.0], period, dt)
        np.testing.assert_allclose(states[-1], [1.0, 0.0], atol=1e-6)
        amp = np.sqrt(states[:, 0] ** 2 + states[:, 1] ** 2)
        assert np.max(np.abs(amp - 1.0)) < 1e-6

    def test_fourth_order_convergence(self):
        # Smooth nonlinear problem with a closed form: logistic growth.
        rhs = lambda t, y: np.array([y[0] * (1.0 - y[0])])
        exact = 1.0 / (1.0 + (1.0 / 0.2 - 1.0) * math.exp(-3.0))

        def err(dt):
            _, states, _ = integrate(rhs, [0.2], 3.0, dt)
            return abs(states[-1, 0] - exact)

        e1, e2 = err(0.01), err(0.005)
        order = math.log2(e1 / e2)
        assert order == pytest.approx(4.0, abs=0.2)

    def test_non_finite_abort_reports_time(self):
        rhs = lambda t, y: np.array([y[0] ** 2])
        with np.errstate(over="ignore"), pytest.raises(NonFiniteState) as err:
            integrate(rhs, [1.0], 10.0, 0.01)
        assert err.value.time is not None

    def test_bad_steps_rejected(self):
        rhs = lambda t, y: np.zeros(1)
        with pytest.raises(ValueError):
            integrate(rhs, [0.0], 1.0, 0.0)
        with pytest.raises(ValueError):
            integrate(rhs, [0.0], 0.001, 0.01)

    def test_deterministic_bitwise(self, geom, soa, dyn):
        setup = ManeuverSetup(geom, soa, dyn,
                              PressureProfile(peak=2e5, rise_time=0.04),
                              -math.pi / 2.0, 0.2, 1e-3)
        t1 = simulate_pulse(setup)
        t2 = simulate_pulse(setup)
        assert t1 == t2


class TestMetrics:
    def test_monotone_ramp_crossing(self):
        times = np.linspace(0.0, 1.0, 101)
        theta = 0.5 * times          # crosses 0.3 rad at t = 0.6
        m = extract_metrics(make_traj(times, theta, np.full_like(times, 0.5)),
                            0.3)
        assert m.t_settle == pytest.approx(0.6, abs=1e-12)
        assert m.v_peak == pytest.approx(0.5)

    def test_sinusoid_peak_velocity(self):
        times = np.linspace(0.0, 2.0, 4001)
        amp, omega = 0.4, 5.0
        traj = make_traj(times, amp * np.sin(omega * times),
                         amp * omega * np.cos(omega * times))
        m = extract_metrics(traj, 10.0)
        assert m.t_settle is None
        assert m.v_peak == pytest.approx(amp * omega, rel=1e-6)

    def test_never_reached_is_reported_not_raised(self):
        times = np.linspace(0.0, 1.0, 11)
        m = extract_metrics(make_traj(times, 0.1 * times, times), 1.0)
        assert m.t_settle is None
        assert m.v_peak > 0.0

    def test_appending_post_settling_samples_is_invariant(self):
        times = np.linspace(0.0, 1.0, 101)
        theta = np.minimum(0.5 * times, 0.4)
        thetadot = np.where(times < 0.8, 0.5, 0.0)
        base = extract_metrics(make_traj(times, theta, thetadot), 0.3)
        times2 = np.concatenate([times, 1.0 + times[1:]])
        theta2 = np.concatenate([theta, np.full(100, 0.4)])
        thetadot2 = np.concatenate([thetadot, np.zeros(100)])
        longer = extract_metrics(make_traj(times2, theta2, thetadot2), 0.3)
        assert longer.t_settle == base.t_settle
        assert longer.v_peak == base.v_peak

    def test_negative_target(self):
        times = np.linspace(0.0, 1.0, 101)
        m = extract_metrics(make_traj(times, -0.5 * times,
                                      np.full_like(times, -0.5)), -0.3)
        assert m.t_settle == pytest.approx(0.6, abs=1e-12)


class TestBaseReaction:
    def test_static_hanging_equilibrium(self, geom, soa):
        # Held still at a bend: reaction force is the weight, torque the
        # gravity moment of the offset centre of mass.
        from tailsim.kinematics import com_distance
        from tailsim.params import DynamicParams

        dyn = DynamicParams()
        theta = 0.5
        times = np.array([0.0, 1.0])
        states = np.tile([0.0, theta, 0.0, 0.0], (2, 1))
        traj = Trajectory(times, states, None, np.zeros((2, 4)),
                          columns=JOINT_COLUMNS, kind="maneuver")
        tau, force = base_reaction(traj, dyn, geom, soa)
        assert np.linalg.norm(force[0]) == pytest.approx(
            dyn.mass * dyn.gravity, rel=1e-12)
        d = com_distance(theta, dyn.arc_length)
        arm = d * math.sin(theta / 2.0)
        assert abs(tau[0]) == pytest.approx(dyn.mass * dyn.gravity * arm,
                                            rel=1e-12)

    def test_tip_mass_adds_weight(self, geom, soa):
        from tailsim.params import DynamicParams

        dyn = DynamicParams()
        times = np.array([0.0, 1.0])
        states = np.tile([0.0, 0.3, 0.0, 0.0], (2, 1))
        traj = Trajectory(times, states, None, np.zeros((2, 4)),
                          columns=JOINT_COLUMNS, kind="maneuver")
        _, f0 = base_reaction(traj, dyn, geom, soa)
        _, f1 = base_reaction(traj, dyn, geom, soa, tip_mass=0.1)
        assert np.linalg.norm(f1[0]) == pytest.approx(
            (dyn.mass + 0.1) * dyn.gravity, rel=1e-12)
        assert np.linalg.norm(f1[0]) > np.linalg.norm(f0[0])

    def test_peak_torque_monotone_in_pressure(self, geom, soa, dyn):
        peaks = []
        for bar in (1.0, 2.0, 4.0, 6.0):
            prof = PressureProfile(peak=bar * 1e5, rise_time=0.04, hold=0.4,
                                   vacuum=0.0)
            setup = ManeuverSetup(geom, soa, dyn, prof, -math.pi / 2.0, 0.4,
                                  5e-4)
            traj = simulate_pulse(setup)
            tau, _ = base_reaction(traj, dyn, geom, soa)
            peaks.append(np.max(np.abs(tau)))
        assert all(a < b for a, b in zip(peaks, peaks[1:]))

    def test_peak_torque_grows_with_tip_mass(self, geom, soa, dyn):
        peaks = []
        for tip in (0.0, 0.05, 0.1):
            prof = PressureProfile(peak=6e5, rise_time=0.04, hold=0.4,
                                   vacuum=0.0)
            setup = ManeuverSetup(geom, soa, dyn, prof, -math.pi / 2.0, 0.4,
                                  5e-4, tip_mass=tip)
            traj = simulate_pulse(setup)
            tau, _ = base_reaction(traj, setup.effective_dyn(), geom, soa,
                                   tip_mass=tip)
            peaks.append(np.max(np.abs(tau)))
        assert peaks[0] < peaks[1] < peaks[2]


class TestEnergyAudit:
    def test_conservative_drift_bounded(self, geom, dyn):
        soa0 = SoaParams(c_damp=0.0)
        setup = ManeuverSetup(geom, soa0, dyn, QUIET, -math.pi / 2.0, 1.0,
                              1e-4)
        rhs, _ = make_joint_rhs(setup)
        times, states, derivs = integrate(rhs, [0.3, 0.25, 1.0, 0.5], 1.0,
                                          1e-4)
        traj = Trajectory(times, states, None, derivs,
                          columns=JOINT_COLUMNS, kind="maneuver")
        energy = energy_series(traj, dyn, geom, soa0)
        assert np.max(np.abs(energy - energy[0])) / energy[0] < 1e-5

    def test_damping_strictly_dissipates(self, geom, dyn):
        soa = SoaParams(c_damp=52.0)
        setup = ManeuverSetup(geom, soa, dyn, QUIET, -math.pi / 2.0, 0.5,
                              1e-4)
        rhs, _ = make_joint_rhs(setup)
        times, states, derivs = integrate(rhs, [0.3, 0.25, 1.0, 0.5], 0.5,
                                          1e-4)
        traj = Trajectory(times, states, None, derivs,
                          columns=JOINT_COLUMNS, kind="maneuver")
        energy = energy_series(traj, dyn, geom, soa)
        assert np.all(np.diff(energy) <= 1e-12)
        assert energy[-1] < 0.9 * energy[0]


class TestManeuver:
    def test_pulse_stays_in_plane(self, geom, soa, dyn):
        prof = PressureProfile(peak=2e5, rise_time=0.04, hold=0.2,
                               vacuum=0.0)
        setup = ManeuverSetup(geom, soa, dyn, prof, -math.pi / 2.0, 0.25,
                              2e-4)
        traj = simulate_pulse(setup)
        assert np.max(np.abs(traj.states[:, 0] + math.pi / 2.0)) < 1e-9
        assert np.max(traj.states[:, 1]) > math.radians(20.0)

    def test_inputs_recorded_per_actuator(self, geom, soa, dyn):
        prof = PressureProfile(peak=2e5, rise_time=0.04, hold=0.2,
                               vacuum=0.0)
        setup = ManeuverSetup(geom, soa, dyn, prof, -math.pi / 2.0, 0.1,
                              1e-3)
        traj = simulate_pulse(setup)
        assert traj.inputs.shape == (len(traj.times), 5)
        driven = traj.inputs[:, [0, 1, 4]]
        idle = traj.inputs[:, [2, 3]]
        assert np.max(driven) == pytest.approx(2e5)
        assert np.all(idle == 0.0)

    def test_higher_pressure_faster_settle(self, geom, soa, dyn):
        settles = []
        for bar in (2.0, 6.0):
            prof = PressureProfile(peak=bar * 1e5, rise_time=0.04, hold=0.4,
                                   vacuum=0.0)
            setup = ManeuverSetup(geom, soa, dyn, prof, -math.pi / 2.0, 0.4,
                                  2e-4)
            m = extract_metrics(simulate_pulse(setup), math.radians(38.0))
            settles.append(m.t_settle)
        assert settles[1] < settles[0]

    def test_trajectory_invariants(self, geom, soa, dyn):
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 0.0]), np.zeros((2, 4)), None,
                       np.zeros((2, 4)), columns=JOINT_COLUMNS)
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 1.0, 2.0]), np.zeros((2, 4)), None,
                       np.zeros((2, 4)), columns=JOINT_COLUMNS)
