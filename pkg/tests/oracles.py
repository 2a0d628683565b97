"""Reference evaluations for cross-checking the library.

Everything here is written directly from the model's closed-form
definitions and deliberately shares no code with the package: transforms
are transcribed entry by entry, lengths go through the homogeneous
transform and a norm, and the dynamics terms are spelled out with their
raw theta-divided expressions (these references are meant for
|theta| >> 1e-8, where the naive forms are still well conditioned).
"""

import math

import mpmath as mp
import numpy as np

mp.mp.dps = 50  # hp_* evaluations must out-resolve double precision

FD_STEP = 1e-4  # matches the library's Jacobian convention


def ref_transform(phi: float, theta: float, arc_length: float) -> np.ndarray:
    """4x4 homogeneous transform of the bent element (naive entries)."""
    c, s = math.cos, math.sin
    cph, sph, cth, sth = c(phi), s(phi), c(theta), s(theta)
    L = arc_length
    return np.array([
        [cph * cph * cth + sph * sph, cph * sph * (cth - 1.0), cph * sth,
         L * cph * (1.0 - cth) / theta],
        [cph * sph * (cth - 1.0), sph * sph * cth + cph * cph, sph * sth,
         L * sph * (1.0 - cth) / theta],
        [-cph * sth, -sph * sth, cth, L * sth / theta],
        [0.0, 0.0, 0.0, 1.0],
    ])


def ref_actuator_length(phi, theta, arc_length, anchor_xy) -> float:
    """||T b - b|| with b homogeneous on the base plane."""
    b = np.array([anchor_xy[0], anchor_xy[1], 0.0, 1.0])
    moved = ref_transform(phi, theta, arc_length) @ b
    return float(np.linalg.norm(moved[:3] - b[:3]))


def ref_actuator_lengths(phi, theta, arc_length, anchors_xy) -> np.ndarray:
    return np.array([ref_actuator_length(phi, theta, arc_length, xy)
                     for xy in anchors_xy])


def ref_actuator_jacobian(phi, theta, arc_length, anchors_xy,
                          step=FD_STEP) -> np.ndarray:
    """Central differences of the reference lengths in (phi, theta)."""
    jac = np.empty((len(anchors_xy), 2))
    jac[:, 0] = (ref_actuator_lengths(phi + step, theta, arc_length, anchors_xy)
                 - ref_actuator_lengths(phi - step, theta, arc_length,
                                        anchors_xy)) / (2.0 * step)
    jac[:, 1] = (ref_actuator_lengths(phi, theta + step, arc_length, anchors_xy)
                 - ref_actuator_lengths(phi, theta - step, arc_length,
                                        anchors_xy)) / (2.0 * step)
    return jac


def ref_inertia(theta, mass, arc_length, inertia) -> np.ndarray:
    """Naive theta-divided entries evaluated in high precision."""
    th = mp.mpf(theta)
    ml2 = mp.mpf(mass) * mp.mpf(arc_length) ** 2
    m11 = inertia + ml2 / th ** 2 * mp.sin(th / 2) ** 2
    m22 = inertia / mp.mpf(4) + ml2 / (4 * th ** 4) * (
        th ** 2 - 2 * th * mp.sin(th) - 2 * mp.cos(th) + 2)
    return np.array([[float(m11), 0.0], [0.0, float(m22)]])


def ref_coriolis(theta, dphi, dtheta, mass, arc_length) -> np.ndarray:
    th = mp.mpf(theta)
    ml2 = mp.mpf(mass) * mp.mpf(arc_length) ** 2
    bracket_a = th / 2 * mp.sin(th) - 2 * mp.sin(th / 2) ** 2
    bracket_b = (th * mp.sin(th) - 2 * mp.sin(th / 2) ** 2
                 - th ** 2 / 2 * mp.cos(th / 2) ** 2)
    c1 = ml2 / th ** 3 * bracket_a * dphi * dtheta
    c2 = (ml2 / th ** 5 * bracket_b * mp.mpf(dtheta) ** 2
          - ml2 / (2 * th ** 3) * bracket_a * mp.mpf(dphi) ** 2)
    return np.array([float(c1), float(c2)])


def ref_gravity(theta, mass, gravity, arc_length) -> np.ndarray:
    th = mp.mpf(theta)
    g2 = mp.mpf(mass) * mp.mpf(gravity) * mp.mpf(arc_length) / th ** 2 * (
        mp.mpf(3) / 2 * th * mp.cos(th / 2) * mp.cos(th)
        - mp.sin(th / 2) * mp.cos(th) - th * mp.cos(th / 2))
    return np.array([0.0, float(g2)])


def ref_stiffness(phi, theta, pressures, anchors_xy, arc_length, area,
                  m_coef, n_coef, lever, rod_stiffness) -> np.ndarray:
    """J^T-weighted actuator moment minus the rod restoring term.

    Length changes are taken from the rest length (straight configuration
    is an equilibrium), matching the library's documented convention.
    """
    pressures = np.asarray(pressures, dtype=float)
    jac = ref_actuator_jacobian(phi, theta, arc_length, anchors_xy)
    lengths = ref_actuator_lengths(phi, theta, arc_length, anchors_xy)
    dl = lengths - arc_length
    k = m_coef * pressures + n_coef
    force = pressures * area - k * dl
    out = jac.T @ (lever * force)
    out[1] -= rod_stiffness * theta
    return out


def ref_damping(phi, theta, anchors_xy, arc_length, c_damp,
                lever) -> np.ndarray:
    """c r J^T J with the dissipative (positive semidefinite) orientation."""
    jac = ref_actuator_jacobian(phi, theta, arc_length, anchors_xy)
    return c_damp * lever * (jac.T @ jac)


def ref_pulse_rise(t, peak, rise_time) -> float:
    return peak * t ** 2 * (3.0 / rise_time ** 2 - 2.0 * t / rise_time ** 3)


def ref_lagrangian(alpha, beta, alphadot, betadot, body_mass, tail_mass,
                   body_inertia, tail_inertia, body_arm, tail_arm,
                   gravity) -> float:
    rel = betadot - alphadot
    return (0.5 * tail_mass * tail_arm ** 2 * rel ** 2
            + 0.5 * body_mass * body_arm ** 2 * alphadot ** 2
            + 0.5 * tail_inertia * rel ** 2
            + 0.5 * body_inertia * alphadot ** 2
            - body_mass * gravity * body_arm * math.sin(alpha)
            - tail_mass * gravity * tail_arm * math.sin(beta - alpha))


def ref_platform_accels(alpha, beta, tau, body_mass, tail_mass, body_inertia,
                        tail_inertia, body_arm, tail_arm, gravity):
    """Assemble and solve the coupled angular equations directly."""
    jt = tail_inertia + tail_mass * tail_arm ** 2
    jtot = body_inertia + body_mass * body_arm ** 2 + jt
    g_tail = tail_mass * gravity * tail_arm * math.cos(beta - alpha)
    g_body = body_mass * gravity * body_arm * math.cos(alpha)
    # Unknown ordering (bdd, add); rows: tail equation, body equation.
    mat = np.array([[jt, -jt], [-jt, jtot]])
    rhs = np.array([tau - g_tail, g_tail - g_body])
    bdd, add = np.linalg.solve(mat, rhs)
    return float(add), float(bdd)


# ---------------------------------------------------------------------------
# High-precision (mpmath) shape evaluations for the small-angle limits.

def hp_mass_shape_phi(theta) -> float:
    th = mp.mpf(theta)
    return float(mp.sin(th / 2) ** 2 / th ** 2)


def hp_mass_shape_theta(theta) -> float:
    th = mp.mpf(theta)
    return float((th ** 2 - 2 * th * mp.sin(th) - 2 * mp.cos(th) + 2)
                 / (4 * th ** 4))


def hp_gravity_shape(theta) -> float:
    th = mp.mpf(theta)
    return float((mp.mpf(3) / 2 * th * mp.cos(th / 2) * mp.cos(th)
                  - mp.sin(th / 2) * mp.cos(th) - th * mp.cos(th / 2))
                 / th ** 2)


def hp_coriolis_shape_theta(theta) -> float:
    th = mp.mpf(theta)
    return float((th * mp.sin(th) - 2 * mp.sin(th / 2) ** 2
                  - th ** 2 / 2 * mp.cos(th / 2) ** 2) / th ** 5)


def hp_mass_shape_phi_prime(theta) -> float:
    th = mp.mpf(theta)
    return float((th / 2 * mp.sin(th) - 2 * mp.sin(th / 2) ** 2) / th ** 3)


def hp_chord(theta) -> float:
    th = mp.mpf(theta)
    return float(2 * mp.sin(th / 2) / th)


def hp_com_factor(theta) -> float:
    th = mp.mpf(theta)
    return float(mp.sin(th / 2) / th)
