"""Constant-curvature kinematics of a single bending element.

The backbone bends as a circular arc of fixed length L, described by the
bending-plane azimuth ``phi`` (measured from +X in the base plane) and the
bending angle ``theta``.  Positive ``theta`` bends the tip toward the
``phi`` direction.  The rigid transform from base panel to moving panel is

    R = Rz(phi) Ry(theta) Rz(-phi),   t = (L/theta) [ (1-cos th) cos ph,
                                                      (1-cos th) sin ph,
                                                      sin th ]

Every theta-divided expression switches to a Taylor branch below
``THETA_EPS`` so the straight configuration is exact; elsewhere the closed
forms are arranged to avoid cancellation (for example 1 - cos th is always
evaluated as 2 sin^2(th/2)).

Direction naming used throughout the package: extension bends toward -Y
(azimuth -90 deg), flexion toward +Y (+90 deg), waggle toward +-X
(0 / 180 deg).  The anchor fan is centred on +Y, so extension recruits
three actuators and flexion two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ActuatorAnchor, JointGeometry

# Taylor-branch radius for theta-divided terms; both branches agree to
# ~1e-12 at the seam.
THETA_EPS = 1e-4

# Soft validation bound on |theta| for a single joint (quasi-static range).
THETA_MAX_DEFAULT = math.radians(60.0)

# Default central-difference step for the actuator Jacobian [rad].  Large
# enough that the O(eps * l / h) rounding floor sits near 1e-14; the O(h^2)
# truncation this buys is deterministic and far inside every stated
# tolerance on the Jacobian.
JACOBIAN_STEP = 1e-4


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.fmod(angle, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True)
class JointConfig:
    """Generalized coordinates (phi, theta) of one bending element."""

    phi: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "phi", wrap_angle(self.phi))

    def violations(self, theta_max: float = THETA_MAX_DEFAULT) -> list[str]:
        out = []
        if not (math.isfinite(self.phi) and math.isfinite(self.theta)):
            out.append("phi and theta must be finite")
        elif abs(self.theta) > theta_max:
            out.append(f"theta exceeds the validated bending range "
                       f"({math.degrees(theta_max):.0f} deg)")
        return out


@dataclass(frozen=True)
class Pose:
    """Proper rigid transform: orthonormal rotation plus translation [m]."""

    rotation: np.ndarray   # (3, 3)
    translation: np.ndarray  # (3,)

    def matrix(self) -> np.ndarray:
        out = np.eye(4)
        out[:3, :3] = self.rotation
        out[:3, 3] = self.translation
        return out

    def compose(self, other: "Pose") -> "Pose":
        """This pose followed by ``other`` expressed in this pose's frame."""
        return Pose(self.rotation @ other.rotation,
                    self.rotation @ other.translation + self.translation)

    def transform_point(self, point) -> np.ndarray:
        return self.rotation @ np.asarray(point, dtype=float) + self.translation


def identity_pose() -> Pose:
    return Pose(np.eye(3), np.zeros(3))


# ---------------------------------------------------------------------------
# Shape functions of theta (all even/odd as appropriate, series-protected).

def _chord_scale(theta: float) -> float:
    """2 sin(th/2) / th: ratio of chord length to arc length."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return 1.0 - t2 / 24.0 + t2 * t2 / 1920.0
    return 2.0 * math.sin(0.5 * theta) / theta


def _f1(theta: float) -> float:
    """(1 - cos th) / th, evaluated as 2 sin^2(th/2) / th."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return theta * (0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    s = math.sin(0.5 * theta)
    return 2.0 * s * s / theta


def _f2(theta: float) -> float:
    """sin th / th."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    return math.sin(theta) / theta


def _f1p(theta: float) -> float:
    """d/dth of _f1: (th sin th + cos th - 1) / th^2."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return 0.5 - t2 / 8.0 + t2 * t2 / 144.0
    h = 0.5 * theta
    s, c = math.sin(h), math.cos(h)
    return 2.0 * s * (theta * c - s) / (theta * theta)


def _f2p(theta: float) -> float:
    """d/dth of _f2: (th cos th - sin th) / th^2."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return theta * (-1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0)
    return (theta * math.cos(theta) - math.sin(theta)) / (theta * theta)


def _f1pp(theta: float) -> float:
    """Second derivative of _f1, cancellation-free closed form."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return theta * (-0.25 + t2 / 36.0 - t2 * t2 / 960.0)
    s = math.sin(0.5 * theta)
    two_s2 = 2.0 * s * s                      # = 1 - cos th
    num = (theta - math.sin(theta)) ** 2 + two_s2 * (two_s2 - theta * theta)
    return num / theta ** 3


def _f2pp(theta: float) -> float:
    """Second derivative of _f2."""
    if abs(theta) < THETA_EPS:
        t2 = theta * theta
        return -1.0 / 3.0 + t2 / 10.0 - t2 * t2 / 168.0
    st, ct = math.sin(theta), math.cos(theta)
    return (2.0 * st - 2.0 * theta * ct - theta * theta * st) / theta ** 3


# ---------------------------------------------------------------------------
# Forward kinematics.

def cc_transform(q: JointConfig, arc_length: float) -> Pose:
    """Base-to-tip rigid transform of a constant-curvature element."""
    if arc_length <= 0.0:
        raise ValueError("arc_length must be positive")
    cph, sph = math.cos(q.phi), math.sin(q.phi)
    cth, sth = math.cos(q.theta), math.sin(q.theta)
    rz_pos = np.array([[cph, -sph, 0.0], [sph, cph, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cth, 0.0, sth], [0.0, 1.0, 0.0], [-sth, 0.0, cth]])
    rz_neg = np.array([[cph, sph, 0.0], [-sph, cph, 0.0], [0.0, 0.0, 1.0]])
    rotation = rz_pos @ ry @ rz_neg
    f1 = _f1(q.theta)
    f2 = _f2(q.theta)
    translation = arc_length * np.array([f1 * cph, f1 * sph, f2])
    return Pose(rotation, translation)


def compose_chain(configs, geoms) -> Pose:
    """Tip pose of several bending elements stacked base to tip."""
    configs = list(configs)
    geoms = list(geoms)
    if len(configs) != len(geoms):
        raise ValueError("configs and geoms must have equal length")
    pose = identity_pose()
    for q, geom in zip(configs, geoms):
        pose = pose.compose(cc_transform(q, geom.arc_length))
    return pose


def com_distance(theta: float, arc_length: float) -> float:
    """Distance from the base to the arc's lumped centre of mass.

    The lumped body sits at the midpoint of the base-to-tip chord, a
    distance (L/th) sin(th/2) from the base; the limit at zero bending is
    L/2.  Even in theta.
    """
    if arc_length <= 0.0:
        raise ValueError("arc_length must be positive")
    return 0.5 * arc_length * _chord_scale(theta)


def _anchor_offsets(anchors) -> np.ndarray:
    if isinstance(anchors, np.ndarray):
        return anchors[:, :2] if anchors.shape[1] > 2 else anchors
    pts = [a.point if isinstance(a, ActuatorAnchor) else a for a in anchors]
    return np.array([[p[0], p[1]] for p in pts], dtype=float)


def actuator_lengths(q: JointConfig, anchors, arc_length: float) -> np.ndarray:
    """Lengths of every actuator for configuration ``q``.

    The actuator spans from its base anchor b to the image of b under the
    joint transform.  The chord reduces to

        l = |L - u theta| * (2 sin(th/2) / th),   u = b . (cos ph, sin ph)

    which is what the norm ||T b - b|| evaluates to; the closed form keeps
    the straight-configuration limit exact (l = L for every anchor).
    """
    xy = _anchor_offsets(anchors)
    u = xy[:, 0] * math.cos(q.phi) + xy[:, 1] * math.sin(q.phi)
    return np.abs(arc_length - u * q.theta) * _chord_scale(q.theta)


def actuator_length(q: JointConfig, anchor, arc_length: float) -> float:
    """Length of a single actuator; see :func:`actuator_lengths`."""
    return float(actuator_lengths(q, [anchor], arc_length)[0])


def actuator_jacobian(q: JointConfig, anchors, arc_length: float,
                      step: float = JACOBIAN_STEP) -> np.ndarray:
    """Partial derivatives of actuator lengths with respect to (phi, theta).

    Central finite differences on the closed-form lengths.  At theta = 0 the
    phi column vanishes identically (lengths do not depend on phi there) and
    the differences return that limit without special casing.
    """
    xy = _anchor_offsets(anchors)
    jac = np.empty((xy.shape[0], 2))
    for col, (dphi, dtheta) in enumerate(((step, 0.0), (0.0, step))):
        hi = JointConfig(q.phi + dphi, q.theta + dtheta)
        lo = JointConfig(q.phi - dphi, q.theta - dtheta)
        jac[:, col] = (actuator_lengths(hi, xy, arc_length)
                       - actuator_lengths(lo, xy, arc_length)) / (2.0 * step)
    return jac


# ---------------------------------------------------------------------------
# Tip-point derivatives (used for reaction wrenches and launch speeds).

def shape_arrays(theta: np.ndarray):
    """Vectorized (f1, f2, f1', f2', f1'', f2'') over a theta array.

    Matches the scalar shape functions branch for branch; used where whole
    trajectories are post-processed at once.
    """
    th = np.asarray(theta, dtype=float)
    small = np.abs(th) < THETA_EPS
    safe = np.where(small, 1.0, th)
    t2 = th * th
    s_half = np.sin(0.5 * safe)
    s_full = np.sin(safe)
    c_full = np.cos(safe)
    f1 = np.where(small, th * (0.5 - t2 / 24.0 + t2 * t2 / 720.0),
                  2.0 * s_half * s_half / safe)
    f2 = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, s_full / safe)
    f1p = np.where(small, 0.5 - t2 / 8.0 + t2 * t2 / 144.0,
                   2.0 * s_half * (safe * np.cos(0.5 * safe) - s_half)
                   / (safe * safe))
    f2p = np.where(small, th * (-1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0),
                   (safe * c_full - s_full) / (safe * safe))
    two_s2 = 2.0 * s_half * s_half
    f1pp = np.where(small, th * (-0.25 + t2 / 36.0 - t2 * t2 / 960.0),
                    ((safe - s_full) ** 2 + two_s2 * (two_s2 - safe * safe))
                    / safe ** 3)
    f2pp = np.where(small, -1.0 / 3.0 + t2 / 10.0 - t2 * t2 / 168.0,
                    (2.0 * s_full - 2.0 * safe * c_full - safe * safe * s_full)
                    / safe ** 3)
    return f1, f2, f1p, f2p, f1pp, f2pp


def translation_jet(phi: float, theta: float, arc_length: float):
    """Tip translation and its first and second partials in (phi, theta).

    Returns ``(t, t_phi, t_theta, t_phiphi, t_phitheta, t_thetatheta)`` as
    3-vectors.  The centre-of-mass point is half the tip translation, so the
    same jet scaled by 0.5 serves for it.
    """
    cph, sph = math.cos(phi), math.sin(phi)
    f1, f2 = _f1(theta), _f2(theta)
    f1p, f2p = _f1p(theta), _f2p(theta)
    f1pp, f2pp = _f1pp(theta), _f2pp(theta)
    L = arc_length
    t = L * np.array([f1 * cph, f1 * sph, f2])
    t_ph = L * np.array([-f1 * sph, f1 * cph, 0.0])
    t_th = L * np.array([f1p * cph, f1p * sph, f2p])
    t_phph = L * np.array([-f1 * cph, -f1 * sph, 0.0])
    t_phth = L * np.array([-f1p * sph, f1p * cph, 0.0])
    t_thth = L * np.array([f1pp * cph, f1pp * sph, f2pp])
    return t, t_ph, t_th, t_phph, t_phth, t_thth


def point_motion(jet, qdot, qddot):
    """Velocity and acceleration of a point given its configuration jet."""
    _, t_ph, t_th, t_phph, t_phth, t_thth = jet
    dph, dth = qdot
    aph, ath = qddot
    vel = t_ph * dph + t_th * dth
    acc = (t_ph * aph + t_th * ath
           + t_phph * dph * dph + 2.0 * t_phth * dph * dth
           + t_thth * dth * dth)
    return vel, acc


def body_axis(phi: float, theta: float) -> np.ndarray:
    """Unit vector along the base-to-tip chord of the lumped body."""
    h = 0.5 * theta
    return np.array([math.sin(h) * math.cos(phi),
                     math.sin(h) * math.sin(phi),
                     math.cos(h)])


def bending_axis(phi: float) -> np.ndarray:
    """Unit vector of the bending rotation axis for plane azimuth phi."""
    return np.array([-math.sin(phi), math.cos(phi), 0.0])
