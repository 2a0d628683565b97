"""Static actuator force law, inverse pressure mapping, and pulse profiles.

The actuator produces ``F = P * area - k(P) * dl`` with the
pressure-dependent stiffness ``k(P) = m_coef * P + n_coef`` and
``dl = l - L`` the length change from rest.  Inverting for pressure at a
desired configuration and per-actuator load gives

    P = (F + n_coef * dl) / (area - m_coef * dl)

which is singular where the denominator vanishes; the guard band is
``SINGULAR_DENOMINATOR_FRACTION * area``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kinematics
from .errors import PressureOutOfRange, SingularMapping
from .params import JointGeometry, SoaParams

SINGULAR_DENOMINATOR_FRACTION = 1e-8


@dataclass(frozen=True)
class PressureProfile:
    """Smooth pressure pulse: cubic rise, hold, cubic fall to vacuum.

    The rise follows P(t) = peak * t^2 (3/t0^2 - 2 t/t0^3), which starts and
    ends with zero slope and reaches ``peak`` exactly at ``rise_time``.  The
    fall to ``vacuum`` reuses the same cubic shape over one ``rise_time`` so
    the whole profile is continuous.
    """

    peak: float               # target pressure P0 [Pa]
    rise_time: float          # t0 [s]
    hold: float = 0.1         # duration at peak [s]
    vacuum: float = -9.0e4    # post-pulse level [Pa]

    def violations(self, soa: SoaParams | None = None) -> list[str]:
        out = []
        if self.rise_time <= 0.0:
            out.append("rise_time must be positive")
        if self.hold < 0.0:
            out.append("hold must be non-negative")
        if not (self.vacuum <= 0.0 <= self.peak):
            out.append("need vacuum <= 0 <= peak")
        if soa is not None:
            if self.peak > soa.p_max:
                out.append("peak exceeds p_max")
            if self.vacuum < soa.p_min:
                out.append("vacuum below p_min")
        return out


@dataclass(frozen=True)
class ActuatorCommand:
    """One pressure per actuator [Pa]."""

    pressures: tuple[float, ...]

    def violations(self, soa: SoaParams) -> list[str]:
        out = []
        for i, p in enumerate(self.pressures):
            if not soa.p_min <= p <= soa.p_max:
                out.append(f"pressure {i + 1} outside "
                           f"[{soa.p_min:.0f}, {soa.p_max:.0f}] Pa")
        return out

    def as_array(self) -> np.ndarray:
        return np.asarray(self.pressures, dtype=float)


def smoothstep_cubic(s: float) -> float:
    """3 s^2 - 2 s^3 on [0, 1]."""
    return s * s * (3.0 - 2.0 * s)


def pressure_at(t: float, prof: PressureProfile) -> float:
    """Pulse pressure at time ``t`` (t >= 0)."""
    if t < 0.0:
        raise ValueError("t must be non-negative")
    t0 = prof.rise_time
    if t < t0:
        return prof.peak * smoothstep_cubic(t / t0)
    if t <= t0 + prof.hold:
        return prof.peak
    s = (t - t0 - prof.hold) / t0
    if s < 1.0:
        return prof.peak + (prof.vacuum - prof.peak) * smoothstep_cubic(s)
    return prof.vacuum


def static_force(pressure: float, dl: float, soa: SoaParams) -> float:
    """Axial force of one actuator at pressure ``pressure`` and stretch ``dl``."""
    stiffness = soa.m_coef * pressure + soa.n_coef
    return pressure * soa.area - stiffness * dl


def inverse_pressure(q: kinematics.JointConfig, forces, geom: JointGeometry,
                     soa: SoaParams, anchors=None) -> ActuatorCommand:
    """Pressures that realize per-actuator forces at configuration ``q``.

    ``forces`` is the external load share assigned to each actuator (the
    static equilibrium solver in :mod:`tailsim.joint_dynamics` computes the
    share; this function does not apportion loads).  Raises
    :class:`SingularMapping` near the denominator zero and
    :class:`PressureOutOfRange` when any pressure leaves the admissible
    band; the exception carries the clamped command as a suggestion.
    """
    from .params import derive_anchors

    if anchors is None:
        anchors = derive_anchors(geom)
    forces = np.asarray(forces, dtype=float)
    if forces.shape != (len(anchors),):
        raise ValueError("forces must provide one value per actuator")
    lengths = kinematics.actuator_lengths(q, anchors, geom.arc_length)
    dl = lengths - geom.arc_length
    denom = soa.area - soa.m_coef * dl
    guard = SINGULAR_DENOMINATOR_FRACTION * soa.area
    if np.any(np.abs(denom) < guard):
        bad = int(np.argmin(np.abs(denom))) + 1
        raise SingularMapping(
            f"inverse mapping singular for actuator {bad}: "
            f"|area - m_coef*dl| < {guard:.3e}")
    pressures = (forces + soa.n_coef * dl) / denom
    if np.any(pressures < soa.p_min) or np.any(pressures > soa.p_max):
        clamped = np.clip(pressures, soa.p_min, soa.p_max)
        raise PressureOutOfRange(
            "required pressures leave the admissible band: "
            + ", ".join(f"{p:.0f}" for p in pressures) + " Pa",
            suggested=ActuatorCommand(tuple(float(p) for p in clamped)))
    return ActuatorCommand(tuple(float(p) for p in pressures))


def drive_mask(anchors, phi_direction: float, margin: float = 0.05) -> np.ndarray:
    """Boolean mask of the actuators that drive bending toward ``phi_direction``.

    An actuator drives the motion when it sits on the far side of the
    bending axis (its length grows with theta), i.e. when the projection of
    its anchor onto the bending direction is negative.  Anchors within
    ``margin`` times the circle radius of the axis stay passive.
    """
    xy = kinematics._anchor_offsets(anchors)
    radius = float(np.max(np.hypot(xy[:, 0], xy[:, 1])))
    proj = (xy[:, 0] * math.cos(phi_direction)
            + xy[:, 1] * math.sin(phi_direction))
    return proj < -margin * radius


def pulse_command(t: float, prof: PressureProfile, mask,
                  n_act: int) -> np.ndarray:
    """Per-actuator pressures at time ``t``: profile on the drive group."""
    p = pressure_at(t, prof)
    out = np.zeros(n_act)
    out[np.asarray(mask, dtype=bool)] = p
    return out
