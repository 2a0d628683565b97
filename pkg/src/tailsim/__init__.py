"""Simulation and identification toolkit for a vertebra-reinforced
pneumatic soft robotic tail: constant-curvature kinematics, lumped joint
dynamics, tail-on-platform coupling, pulse-driven maneuvers, and the
parameter fits used to calibrate them."""

from .actuation import (ActuatorCommand, PressureProfile, inverse_pressure,
                        pressure_at, static_force)
from .errors import (ConfigError, DegenerateAbscissa, NoInput, NonFiniteState,
                     NonPositiveData, NotConverged, PressureOutOfRange,
                     SingularInertia, SingularMapping, TailsimError)
from .joint_dynamics import (DynamicsTerms, JointState, coriolis_vector,
                             damping_matrix, dynamics_terms,
                             equilibrium_forces, forward_dynamics,
                             gravity_vector, inertia_matrix, inverse_dynamics,
                             joint_energy, stiffness_term)
from .kinematics import (JointConfig, Pose, actuator_jacobian,
                         actuator_length, actuator_lengths, cc_transform,
                         com_distance, compose_chain)
from .params import (ActuatorAnchor, DynamicParams, JointGeometry,
                     PlatformParams, SoaParams, derive_anchors, validate)
from .platform import (PlatformState, kinetic_energy, lagrangian,
                       momentum_invariant, platform_accels)
from .simulate import (ManeuverSetup, MotionMetrics, Trajectory,
                       base_reaction, extract_metrics, integrate,
                       simulate_platform, simulate_pulse)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
