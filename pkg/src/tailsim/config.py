"""Structured configuration files.

TOML files with up to five sections: ``[geometry]``, ``[soa]``,
``[dynamics]``, ``[platform]``, and ``[scenario]``.  Keys carry their unit
as a suffix (``_mm``, ``_deg``, ``_bar``, ...) and are converted to SI on
load; see ``configs/default.toml`` for the annotated defaults.  Unknown
sections or keys are errors, never silently ignored.  Every omitted key
falls back to the shipped default value.
"""

from __future__ import annotations

import math
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .params import (DynamicParams, JointGeometry, PlatformParams, SoaParams,
                     validate)

MM = 1e-3
MM2 = 1e-6
MM4 = 1e-12
BAR = 1e5
MPA = 1e6
DEG = math.pi / 180.0
GRAM = 1e-3

KNOWN_SECTIONS = ("geometry", "soa", "dynamics", "platform", "scenario")

# section -> key -> (dataclass field, SI scale); None scale = passthrough.
GEOMETRY_KEYS = {
    "joint_height_mm": ("joint_height", MM),
    "panel_gap_mm": ("panel_gap", MM),
    "actuator_circle_diameter_mm": ("actuator_circle_diameter", MM),
    "panel_diameter_mm": ("panel_diameter", MM),
    "actuator_spacing_deg": ("actuator_spacing", DEG),
    "arc_length_mm": ("arc_length", MM),
    "n_act": ("n_act", None),
    "segment_tilt_deg": ("segment_tilt", DEG),
}
SOA_KEYS = {
    "area_mm2": ("area", MM2),
    "m_coef_per_bar": ("m_coef", 1.0 / BAR),   # (N/m)/bar -> (N/m)/Pa
    "n_coef_n_per_m": ("n_coef", 1.0),
    "c_damp_ns_per_m": ("c_damp", 1.0),
    "lever_arm_mm": ("lever_arm", MM),
    "p_max_bar": ("p_max", BAR),
    "p_min_bar": ("p_min", BAR),
    "per_anchor_lever": ("per_anchor_lever", None),
}
DYNAMICS_KEYS = {
    "mass_kg": ("mass", 1.0),
    "inertia_kgm2": ("inertia", 1.0),
    "arc_length_mm": ("arc_length", MM),
    "young_modulus_mpa": ("young_modulus", MPA),
    "area_moment_m4": ("area_moment", 1.0),
    "rod_diameter_mm": (None, None),   # convenience, converted to area_moment
    "gravity_m_s2": ("gravity", 1.0),
}
PLATFORM_KEYS = {
    "body_mass_kg": ("body_mass", 1.0),
    "tail_mass_kg": ("tail_mass", 1.0),
    "body_inertia_kgm2": ("body_inertia", 1.0),
    "tail_inertia_kgm2": ("tail_inertia", 1.0),
    "body_arm_mm": ("body_arm", MM),
    "tail_arm_mm": ("tail_arm", MM),
    "gravity_m_s2": ("gravity", 1.0),
}


def _convert_section(name: str, table: dict, key_map: dict) -> dict:
    unknown = sorted(set(table) - set(key_map))
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(unknown)}")
    out = {}
    for key, value in table.items():
        field, scale = key_map[key]
        if field is None:
            continue
        if scale is None:
            out[field] = value
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"[{name}] {key} must be a number")
            out[field] = float(value) * scale
    return out


def _build_geometry(table: dict) -> JointGeometry:
    return JointGeometry(**_convert_section("geometry", table, GEOMETRY_KEYS))


def _build_soa(table: dict, geom: JointGeometry) -> SoaParams:
    fields = _convert_section("soa", table, SOA_KEYS)
    # The moment arm tracks the anchor circle unless overridden explicitly.
    fields.setdefault("lever_arm", geom.actuator_circle_diameter / 2.0)
    return SoaParams(**fields)


def _build_dynamics(table: dict) -> DynamicParams:
    fields = _convert_section("dynamics", table, DYNAMICS_KEYS)
    if "rod_diameter_mm" in table:
        if "area_moment_m4" in table:
            raise ConfigError(
                "[dynamics] give rod_diameter_mm or area_moment_m4, not both")
        d = float(table["rod_diameter_mm"]) * MM
        fields["area_moment"] = math.pi * d ** 4 / 64.0
    if "inertia_kgm2" not in table:
        # Thin-rod estimate about the centre of mass.
        mass = fields.get("mass", DynamicParams.mass)
        arc = fields.get("arc_length", DynamicParams.arc_length)
        fields["inertia"] = mass * arc ** 2 / 12.0
    return DynamicParams(**fields)


def _build_platform(table: dict) -> PlatformParams:
    return PlatformParams(**_convert_section("platform", table, PLATFORM_KEYS))


def load_params(path):
    """Parse a configuration file into validated parameter sets.

    Returns ``(geometry, soa, dynamics, platform, scenario_table)`` where
    ``scenario_table`` is the raw ``[scenario]`` table (empty dict when the
    file has none); its schema belongs to the scenario runner.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from None

    unknown = sorted(set(data) - set(KNOWN_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")

    geom = _build_geometry(data.get("geometry", {}))
    soa = _build_soa(data.get("soa", {}), geom)
    dyn = _build_dynamics(data.get("dynamics", {}))
    plat = _build_platform(data.get("platform", {}))

    problems = []
    for label, params in (("geometry", geom), ("soa", soa),
                          ("dynamics", dyn), ("platform", plat)):
        problems += [f"[{label}] {v}" for v in validate(params)]
    if problems:
        raise ConfigError("invalid parameters: " + "; ".join(problems))
    return geom, soa, dyn, plat, data.get("scenario", {})
