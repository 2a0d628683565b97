"""Physical parameter sets, validation, and derived geometry.

All quantities are SI (metres, kilograms, seconds, pascals, radians).
Configuration files may use mm / deg / bar; :mod:`tailsim.config` converts on
load.  Every parameter type here is a frozen dataclass: instances are
immutable after construction and safe to share across threads.

Conventions
-----------
* The joint base frame has z along the undeformed backbone and the actuator
  anchors in the z = 0 plane.
* The anchor layout is centred on the +Y axis, so the sagittal plane is YZ
  and the anchor set is mirror symmetric under x -> -x.
* ``validate`` never raises: it returns a list of human-readable violations,
  empty when the instance is consistent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

# Hard actuation limits of the pneumatic supply: 6 bar positive, 95 kPa vacuum.
PRESSURE_CEILING_PA = 6.0e5
VACUUM_FLOOR_PA = -9.5e4

# Informational record of the bellows actuator geometry (mm / deg); the static
# force model only consumes the circumcircle diameter via SoaParams.area.
ACTUATOR_GEOMETRY_MM = {
    "height": 37.60,
    "origami_height": 35.00,
    "facet_thickness": 1.00,
    "facet_dihedral_deg": 73.83,
    "fillet_radius": 1.20,
    "circumcircle_diameter": 24.78,
    "facet_short_side": 5.30,
    "facet_long_side": 18.21,
}


@dataclass(frozen=True)
class JointGeometry:
    """Geometric constants of a single vertebraic joint.

    ``arc_length`` defaults to ``panel_gap``: the elastic rod spans the gap
    between the two panels, and no independent value is available.  Override
    it in configuration when modelling a multi-joint segment as one lumped
    bending element.
    """

    joint_height: float = 42.51e-3      # overall joint height H_j [m]
    panel_gap: float = 36.51e-3         # initial gap between panels H_a [m]
    actuator_circle_diameter: float = 45.87e-3  # anchor circle D_a [m]
    panel_diameter: float = 70.94e-3    # rigid end panel D_p [m]
    actuator_spacing: float = math.radians(72.0)  # angular pitch alpha_1 [rad]
    arc_length: float = 36.51e-3        # backbone arc length per joint L [m]
    n_act: int = 5
    segment_tilt: float = math.radians(91.23)  # alpha_2, stored but unused

    def violations(self) -> list[str]:
        out = []
        for name in ("joint_height", "panel_gap", "actuator_circle_diameter",
                     "panel_diameter", "arc_length"):
            if getattr(self, name) <= 0.0:
                out.append(f"{name} must be positive")
        if self.n_act < 1:
            out.append("n_act must be at least 1")
        if self.actuator_spacing <= 0.0:
            out.append("actuator_spacing must be positive")
        elif self.actuator_spacing * self.n_act > 2.0 * math.pi + 1e-12:
            out.append("actuator_spacing * n_act must not exceed a full circle")
        if self.arc_length < self.panel_gap:
            # Physically the rod cannot be shorter than the gap it spans, but
            # reduced-order models may want it; warn instead of rejecting.
            warnings.warn(
                "arc_length is shorter than panel_gap; allowed, but check the "
                "lumping convention", stacklevel=2)
        return out


@dataclass(frozen=True)
class ActuatorAnchor:
    """Base-frame anchor point of one linear actuator."""

    index: int
    point: tuple[float, float, float]  # [m], lies in the z = 0 base plane

    def homogeneous(self) -> tuple[float, float, float, float]:
        x, y, z = self.point
        return (x, y, z, 1.0)


@dataclass(frozen=True)
class SoaParams:
    """Static model constants of one soft origami actuator.

    The output force under pressure ``P`` at length change ``dl`` is
    ``P * area - (m_coef * P + n_coef) * dl``.  ``m_coef`` and ``n_coef``
    come from bench calibration of a single actuator; the shipped defaults
    are synthetic values sized for the demo scenarios and must be replaced
    for any physical prediction.
    """

    area: float = math.pi * (24.78e-3 / 2.0) ** 2  # effective section [m^2]
    m_coef: float = 3.0e-2      # stiffness-vs-pressure slope [(N/m)/Pa]
    n_coef: float = 150.0       # stiffness offset [N/m]
    c_damp: float = 52.0        # linear damping per actuator [N s/m]
    lever_arm: float = 45.87e-3 / 2.0  # moment arm r = D_a / 2 [m]
    p_max: float = PRESSURE_CEILING_PA
    p_min: float = VACUUM_FLOOR_PA
    per_anchor_lever: bool = False  # refine r to each anchor's own offset

    def violations(self) -> list[str]:
        out = []
        if self.area <= 0.0:
            out.append("area must be positive")
        if self.lever_arm <= 0.0:
            out.append("lever_arm must be positive")
        if not (self.p_min < 0.0 < self.p_max):
            out.append("pressure band must satisfy p_min < 0 < p_max")
        if self.p_max > PRESSURE_CEILING_PA:
            out.append("p_max exceeds the 6 bar supply limit")
        if self.p_min < VACUUM_FLOOR_PA:
            out.append("p_min exceeds the 95 kPa vacuum limit")
        if self.c_damp < 0.0:
            out.append("c_damp must be non-negative")
        return out


@dataclass(frozen=True)
class DynamicParams:
    """Lumped rigid-body and elasticity constants of a joint or segment.

    ``inertia`` is taken about the centre of mass; the configuration
    dependent parallel-axis contributions appear explicitly in the inertia
    matrix.  The default inertia is the thin-rod estimate m L^2 / 12; the
    hardware value was never measured.
    """

    mass: float = 0.1112                 # lumped mass [kg]
    inertia: float = 0.1112 * (3 * 36.51e-3) ** 2 / 12.0  # about CoM [kg m^2]
    arc_length: float = 3 * 36.51e-3     # lumped backbone length [m]
    young_modulus: float = 3.0e7         # effective rod modulus [Pa]
    area_moment: float = math.pi * 6.0e-3 ** 4 / 64.0  # rod section [m^4]
    gravity: float = 9.81                # [m/s^2], 0 allowed for conservation

    def violations(self) -> list[str]:
        out = []
        for name in ("mass", "inertia", "arc_length", "young_modulus",
                     "area_moment"):
            if getattr(self, name) <= 0.0:
                out.append(f"{name} must be positive")
        if self.gravity < 0.0:
            out.append("gravity must be non-negative")
        return out

    @property
    def bending_stiffness(self) -> float:
        """Rod restoring stiffness E I / L [N m / rad]."""
        return self.young_modulus * self.area_moment / self.arc_length


@dataclass(frozen=True)
class PlatformParams:
    """Two-body planar cart-and-tail constants.

    ``body_arm`` and ``tail_arm`` are the centre-of-mass distances from the
    shared hinge.
    """

    body_mass: float = 1.5        # m_r [kg]
    tail_mass: float = 0.283      # m_t [kg]
    body_inertia: float = 0.02    # I_r about body CoM [kg m^2]
    tail_inertia: float = 2.0e-3  # I_t about tail CoM [kg m^2]
    body_arm: float = 0.10        # L_r [m]
    tail_arm: float = 0.105       # L_t [m]
    gravity: float = 9.81

    def violations(self) -> list[str]:
        out = []
        for name in ("body_mass", "tail_mass", "body_inertia", "tail_inertia",
                     "body_arm", "tail_arm"):
            if getattr(self, name) <= 0.0:
                out.append(f"{name} must be positive")
        if self.gravity < 0.0:
            out.append("gravity must be non-negative")
        return out

    @property
    def tail_coupling(self) -> float:
        """Hinge-referred tail inertia I_t + m_t L_t^2."""
        return self.tail_inertia + self.tail_mass * self.tail_arm ** 2

    @property
    def total_coupling(self) -> float:
        """Hinge-referred total inertia of body plus tail."""
        return (self.body_inertia + self.body_mass * self.body_arm ** 2
                + self.tail_coupling)


def derive_anchors(geom: JointGeometry) -> list[ActuatorAnchor]:
    """Place the actuator anchors on the base-panel circle.

    The fan of ``n_act`` anchors is centred on the +Y axis with angular pitch
    ``actuator_spacing``, which makes the set mirror symmetric about the YZ
    plane for any count and pitch.  Anchors are returned ordered by azimuth
    starting from the +Y anchor and increasing counter-clockwise.
    """
    radius = geom.actuator_circle_diameter / 2.0
    n = geom.n_act
    base = math.pi / 2.0
    offsets = [(k - (n - 1) / 2.0) * geom.actuator_spacing for k in range(n)]
    angles = [base + off for off in offsets]
    angles.sort(key=lambda a: (a - base) % (2.0 * math.pi) - 1e-12)
    anchors = []
    for i, ang in enumerate(angles):
        x = radius * math.cos(ang)
        y = radius * math.sin(ang)
        # Snap the values that are exact by symmetry so mirror pairs match
        # to the last bit.
        if abs(x) < 1e-15 * radius:
            x = 0.0
        anchors.append(ActuatorAnchor(index=i, point=(x, y, 0.0)))
    return anchors


def anchor_array(anchors):
    """Anchor coordinates as an (n, 3) list-of-tuples -> ndarray helper."""
    import numpy as np

    return np.array([a.point for a in anchors], dtype=float)


def validate(params) -> list[str]:
    """Collect every violated invariant of a parameter instance.

    Returns an empty list when the instance is valid.  Validation reports
    all problems at once and never raises.
    """
    try:
        return params.violations()
    except AttributeError:
        raise TypeError(f"{type(params).__name__} is not a validatable "
                        "parameter type") from None
