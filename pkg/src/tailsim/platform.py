"""Planar two-body dynamics of a hinged cart with an actuated tail.

The body rotates by ``alpha`` and the tail by the relative angle ``beta``
(measured in the reflected sense: the tail's absolute orientation is
``beta - alpha``).  With the hinge-referred inertias

    J_t = I_t + m_t L_t^2,     J_tot = I_r + m_r L_r^2 + J_t

the motion under hinge torque ``tau`` is governed by

    J_t (bdd - add) + m_t g L_t cos(beta - alpha) = tau
    J_tot add - J_t bdd + m_r g L_r cos(alpha)
                        - m_t g L_t cos(beta - alpha) = 0

solved simultaneously for (add, bdd): the coefficient matrix on the
unknowns ordered (bdd, add) is [[J_t, -J_t], [-J_t, J_tot]] with
determinant J_t * (J_tot - J_t) > 0.  With gravity off, the quantity
``J_tot * alphadot - J_t * betadot`` (the hinge angular momentum in the
reflected-beta convention) is conserved for any applied tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularInertia
from .params import PlatformParams

SINGULAR_DET = 1e-12


@dataclass(frozen=True)
class PlatformState:
    """Angles and rates of the coupled body-tail system."""

    alpha: float      # platform angle [rad]
    beta: float       # relative tail angle [rad]
    alphadot: float = 0.0
    betadot: float = 0.0

    def violations(self) -> list[str]:
        if all(math.isfinite(v) for v in
               (self.alpha, self.beta, self.alphadot, self.betadot)):
            return []
        return ["state components must be finite"]


def platform_accels(state: PlatformState, tau: float,
                    params: PlatformParams) -> tuple[float, float]:
    """Simultaneous solution (alpha_dd, beta_dd) of the coupled equations."""
    jt = params.tail_coupling
    jtot = params.total_coupling
    det = jt * jtot - jt * jt
    if det < SINGULAR_DET:
        raise SingularInertia(
            f"coupling determinant {det:.3e} too small; degenerate inertias")
    g_tail = (params.tail_mass * params.gravity * params.tail_arm
              * math.cos(state.beta - state.alpha))
    g_body = (params.body_mass * params.gravity * params.body_arm
              * math.cos(state.alpha))
    # Rows: tail equation then body equation, unknowns ordered (bdd, add).
    rhs_tail = tau - g_tail
    rhs_body = g_tail - g_body
    bdd = (jtot * rhs_tail + jt * rhs_body) / det
    add = (jt * rhs_tail + jt * rhs_body) / det
    return add, bdd


def lagrangian(state: PlatformState, params: PlatformParams) -> float:
    """Kinetic minus potential energy of the two-body system."""
    return kinetic_energy(state, params) - potential_energy(state, params)


def kinetic_energy(state: PlatformState, params: PlatformParams) -> float:
    rel = state.betadot - state.alphadot
    return (0.5 * params.tail_mass * params.tail_arm ** 2 * rel ** 2
            + 0.5 * params.body_mass * params.body_arm ** 2
            * state.alphadot ** 2
            + 0.5 * params.tail_inertia * rel ** 2
            + 0.5 * params.body_inertia * state.alphadot ** 2)


def potential_energy(state: PlatformState, params: PlatformParams) -> float:
    return (params.body_mass * params.gravity * params.body_arm
            * math.sin(state.alpha)
            + params.tail_mass * params.gravity * params.tail_arm
            * math.sin(state.beta - state.alpha))


def momentum_invariant(state: PlatformState, params: PlatformParams) -> float:
    """J_tot alphadot - J_t betadot; constant when gravity is zero."""
    return (params.total_coupling * state.alphadot
            - params.tail_coupling * state.betadot)


def platform_rhs(tau_of_t, params: PlatformParams):
    """State derivative function for the integrator.

    ``tau_of_t`` maps time to hinge torque.  State layout:
    (alpha, beta, alphadot, betadot).
    """

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        state = PlatformState(y[0], y[1], y[2], y[3])
        add, bdd = platform_accels(state, tau_of_t(t), params)
        return np.array([y[2], y[3], add, bdd])

    return rhs
