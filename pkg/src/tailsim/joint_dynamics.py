"""Lumped rigid-body dynamics of one bending joint or segment.

Equation of motion for the generalized coordinates q = (phi, theta):

    M(q) qdd + c(q, qd) + D(q) qd + G(q) = tau + K(q, P)

* ``M`` is diagonal and configuration dependent.
* ``c`` is the full Coriolis/centrifugal force vector (rate products
  included); it is exactly the Christoffel form of M, which is what makes
  the undamped, unpressurized joint conserve energy.
* ``D qd`` dissipates: D is positive semidefinite by construction
  (c_damp * J^T diag(arm) J), so the quadratic form qd' D qd is the
  non-negative dissipated power.
* ``G`` is the gravity load (theta component only).
* ``K`` collects the moments applied by the actuators and the elastic rod:
  K = J^T (arm * F) - (E I / L) theta on the theta row, with per-actuator
  force F_i = P_i A - k_i dl_i and dl_i = l_i - L, so the unpressurized
  straight joint is an exact equilibrium.  K sits on the right-hand side:
  positive pressure on an actuator whose length grows with theta drives
  theta forward, and the rod term restores toward zero.
* ``tau`` is reserved for additional external/base loads.

The lever ``arm`` is uniform (r = D_a/2) by default; setting
``SoaParams.per_anchor_lever`` replaces it with each anchor's own distance
to the bending axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kinematics
from .kinematics import THETA_EPS, JointConfig
from .params import DynamicParams, JointGeometry, SoaParams, derive_anchors


@dataclass(frozen=True)
class JointState:
    """Configuration and rates of one joint."""

    q: JointConfig
    qdot: tuple[float, float]  # (phi_dot, theta_dot) [rad/s]

    def violations(self) -> list[str]:
        out = self.q.violations()
        if not all(math.isfinite(v) for v in self.qdot):
            out.append("rates must be finite")
        return out


@dataclass(frozen=True)
class DynamicsTerms:
    """Every term of the equation of motion evaluated at one state."""

    inertia: np.ndarray      # M, (2, 2)
    coriolis: np.ndarray     # c, (2,)
    gravity: np.ndarray      # G, (2,)
    stiffness: np.ndarray    # K, (2,)
    damping: np.ndarray      # D, (2, 2)


# ---------------------------------------------------------------------------
# Shape functions of theta.  Each closed form is arranged to be cancellation
# free and switches to its Taylor branch below THETA_EPS.

def _mass_shape_phi(theta: float) -> float:
    """sin^2(th/2) / th^2, the phi-row mass factor; -> 1/4 at zero."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return 0.25 - t2 / 48.0 + t2 * t2 / 1440.0
    s = math.sin(0.5 * theta)
    return s * s / (theta * theta)


def _mass_shape_theta(theta: float) -> float:
    """(th^2 - 2 th sin th - 2 cos th + 2) / (4 th^4); -> 1/16 at zero.

    Evaluated via the identity with (th - sin th)^2 + 4 sin^4(th/2), whose
    two terms are non-negative, so no digits cancel.
    """
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return 1.0 / 16.0 - t2 / 288.0 + t2 * t2 / 11520.0
    s = math.sin(0.5 * theta)
    d = theta - math.sin(theta)
    return (d * d + 4.0 * s ** 4) / (4.0 * theta ** 4)


# The three shapes below lose ~eps/theta^2 relative accuracy to cancellation
# when evaluated in closed form, so their Taylor branches extend well past
# THETA_EPS (radius chosen per function so both branches stay within ~1e-12
# of the true value at the seam).
PHI_PRIME_SWITCH = 0.06
CORIOLIS_SWITCH = 0.12
GRAVITY_SWITCH = 0.06


def _mass_shape_phi_prime(theta: float) -> float:
    """d/dth of the phi-row mass factor: (th sin th / 2 - 2 sin^2(th/2)) / th^3."""
    if abs(theta) < PHI_PRIME_SWITCH:
        t2 = theta * theta
        return theta * (-1.0 / 24.0 + t2 * (1.0 / 360.0 + t2 * (
            -1.0 / 13440.0 + t2 * (1.0 / 907200.0 + t2 * (-1.0 / 95800320.0)))))
    h = 0.5 * theta
    s, c = math.sin(h), math.cos(h)
    return s * (theta * c - 2.0 * s) / theta ** 3


def _coriolis_shape_theta(theta: float) -> float:
    """(th sin th - 2 sin^2(th/2) - th^2 cos^2(th/2) / 2) / th^5.

    Equal to -(th cos(th/2) - 2 sin(th/2))^2 / (2 th^5), manifestly the
    half-derivative of the theta-row mass factor.
    """
    if abs(theta) < CORIOLIS_SWITCH:
        t2 = theta * theta
        return theta * (-1.0 / 288.0 + t2 * (1.0 / 5760.0 + t2 * (
            -1.0 / 268800.0 + t2 * (1.0 / 21772800.0
                                    + t2 * (-1.0 / 2682408960.0)))))
    h = 0.5 * theta
    inner = theta * math.cos(h) - 2.0 * math.sin(h)
    return -0.5 * inner * inner / theta ** 5


def _gravity_shape(theta: float) -> float:
    """((3 th/2) cos(th/2) cos th - sin(th/2) cos th - th cos(th/2)) / th^2."""
    if abs(theta) < GRAVITY_SWITCH:
        t2 = theta * theta
        return theta * (-13.0 / 24.0 + t2 * (121.0 / 960.0 + t2 * (
            -1.01655505952380952e-2 + t2 * (4.23736841380070547e-4
                                            + t2 * -1.0834669902459616e-5))))
    h = 0.5 * theta
    ch, sh = math.cos(h), math.sin(h)
    ct = math.cos(theta)
    return (1.5 * theta * ch * ct - sh * ct - theta * ch) / (theta * theta)


# ---------------------------------------------------------------------------
# Term evaluators.

def inertia_matrix(q: JointConfig, dyn: DynamicParams) -> np.ndarray:
    """Configuration-dependent diagonal inertia matrix."""
    ml2 = dyn.mass * dyn.arc_length ** 2
    m11 = dyn.inertia + ml2 * _mass_shape_phi(q.theta)
    m22 = 0.25 * dyn.inertia + ml2 * _mass_shape_theta(q.theta)
    return np.array([[m11, 0.0], [0.0, m22]])


def coriolis_vector(state: JointState, dyn: DynamicParams) -> np.ndarray:
    """Velocity-product force vector (Christoffel form of the inertia)."""
    dphi, dtheta = state.qdot
    theta = state.q.theta
    ml2 = dyn.mass * dyn.arc_length ** 2
    ap = _mass_shape_phi_prime(theta)
    c1 = ml2 * ap * dphi * dtheta
    c2 = (ml2 * _coriolis_shape_theta(theta) * dtheta * dtheta
          - 0.5 * ml2 * ap * dphi * dphi)
    return np.array([c1, c2])


def gravity_vector(q: JointConfig, dyn: DynamicParams) -> np.ndarray:
    """Gravity load; the phi component is identically zero."""
    g2 = dyn.mass * dyn.gravity * dyn.arc_length * _gravity_shape(q.theta)
    return np.array([0.0, g2])


def _lever_arms(q: JointConfig, anchors_xy: np.ndarray,
                soa: SoaParams) -> np.ndarray:
    if not soa.per_anchor_lever:
        return np.full(anchors_xy.shape[0], soa.lever_arm)
    proj = (anchors_xy[:, 0] * math.cos(q.phi)
            + anchors_xy[:, 1] * math.sin(q.phi))
    return np.abs(proj)


def _actuator_state(q: JointConfig, anchors, geom: JointGeometry):
    """Lengths and length Jacobian shared by the stiffness and damping terms."""
    xy = kinematics._anchor_offsets(anchors)
    lengths = kinematics.actuator_lengths(q, xy, geom.arc_length)
    jac = kinematics.actuator_jacobian(q, xy, geom.arc_length)
    return xy, lengths, jac


def stiffness_term(q: JointConfig, command, geom: JointGeometry,
                   soa: SoaParams, dyn: DynamicParams,
                   anchors=None) -> np.ndarray:
    """Net elastic plus pneumatic moment K(q, P).

    With zero pressure this is purely restoring: the rod term opposes theta
    and the actuator springs oppose any length change from rest.
    """
    if anchors is None:
        anchors = derive_anchors(geom)
    pressures = command.as_array() if hasattr(command, "as_array") \
        else np.asarray(command, dtype=float)
    xy, lengths, jac = _actuator_state(q, anchors, geom)
    dl = lengths - geom.arc_length
    stiff = soa.m_coef * pressures + soa.n_coef
    force = pressures * soa.area - stiff * dl
    arm = _lever_arms(q, xy, soa)
    out = jac.T @ (arm * force)
    out[1] -= dyn.bending_stiffness * q.theta
    return out


def damping_matrix(q: JointConfig, geom: JointGeometry, soa: SoaParams,
                   anchors=None) -> np.ndarray:
    """Positive-semidefinite damping matrix D = c_damp J^T diag(arm) J."""
    if anchors is None:
        anchors = derive_anchors(geom)
    xy, _, jac = _actuator_state(q, anchors, geom)
    arm = _lever_arms(q, xy, soa)
    return soa.c_damp * (jac.T @ (arm[:, None] * jac))


def dynamics_terms(state: JointState, command, dyn: DynamicParams,
                   geom: JointGeometry, soa: SoaParams,
                   anchors=None) -> DynamicsTerms:
    """Evaluate every equation-of-motion term at one state."""
    if anchors is None:
        anchors = derive_anchors(geom)
    return DynamicsTerms(
        inertia=inertia_matrix(state.q, dyn),
        coriolis=coriolis_vector(state, dyn),
        gravity=gravity_vector(state.q, dyn),
        stiffness=stiffness_term(state.q, command, geom, soa, dyn, anchors),
        damping=damping_matrix(state.q, geom, soa, anchors),
    )


def forward_dynamics(state: JointState, command, dyn: DynamicParams,
                     geom: JointGeometry, soa: SoaParams,
                     tau=(0.0, 0.0), anchors=None) -> np.ndarray:
    """Accelerations (phi_dd, theta_dd) under pressures and external load."""
    terms = dynamics_terms(state, command, dyn, geom, soa, anchors)
    qdot = np.asarray(state.qdot, dtype=float)
    rhs = (np.asarray(tau, dtype=float) + terms.stiffness - terms.coriolis
           - terms.damping @ qdot - terms.gravity)
    # M is diagonal and positive definite.
    return rhs / np.diag(terms.inertia)


def inverse_dynamics(state: JointState, qddot, dyn: DynamicParams,
                     geom: JointGeometry, soa: SoaParams,
                     command=None, anchors=None) -> np.ndarray:
    """External generalized load required to realize ``qddot``.

    tau = M qdd + c + D qd + G - K.  With zero pressures, zero rates and a
    straight configuration the result is exactly zero.
    """
    if command is None:
        command = np.zeros(geom.n_act)
    terms = dynamics_terms(state, command, dyn, geom, soa, anchors)
    qdot = np.asarray(state.qdot, dtype=float)
    qddot = np.asarray(qddot, dtype=float)
    return (terms.inertia @ qddot + terms.coriolis + terms.damping @ qdot
            + terms.gravity - terms.stiffness)


def equilibrium_forces(q: JointConfig, dyn: DynamicParams,
                       geom: JointGeometry, soa: SoaParams,
                       anchors=None) -> np.ndarray:
    """Least-norm per-actuator forces that hold ``q`` statically.

    Solves J^T (arm * F) = G + (E I / L) theta e_theta in the least-squares
    sense; feed the result to :func:`tailsim.actuation.inverse_pressure`.
    """
    if anchors is None:
        anchors = derive_anchors(geom)
    xy, _, jac = _actuator_state(q, anchors, geom)
    arm = _lever_arms(q, xy, soa)
    target = gravity_vector(q, dyn).copy()
    target[1] += dyn.bending_stiffness * q.theta
    lhs = jac.T * arm[None, :]
    sol, *_ = np.linalg.lstsq(lhs, target, rcond=None)
    return sol


def joint_energy(state: JointState, dyn: DynamicParams, geom: JointGeometry,
                 soa: SoaParams, anchors=None) -> float:
    """Mechanical energy of the unpressurized joint.

    Kinetic term plus the rod bending potential plus the lever-weighted
    actuator spring potential; the spring weighting matches the moment
    convention of :func:`stiffness_term`, so this quantity is exactly
    conserved by the undamped, unpressurized, gravity-free dynamics
    (uniform-lever mode).
    """
    if anchors is None:
        anchors = derive_anchors(geom)
    qdot = np.asarray(state.qdot, dtype=float)
    kinetic = 0.5 * qdot @ inertia_matrix(state.q, dyn) @ qdot
    rod = 0.5 * dyn.bending_stiffness * state.q.theta ** 2
    xy = kinematics._anchor_offsets(anchors)
    dl = kinematics.actuator_lengths(state.q, xy, geom.arc_length) \
        - geom.arc_length
    arm = _lever_arms(state.q, xy, soa)
    spring = 0.5 * soa.n_coef * float(np.sum(arm * dl * dl))
    return float(kinetic + rod + spring)
