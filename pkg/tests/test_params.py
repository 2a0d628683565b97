import math

import numpy as np
import pytest

from tailsim.params import (ACTUATOR_GEOMETRY_MM, DynamicParams,
                            JointGeometry, PlatformParams, SoaParams,
                            derive_anchors, validate)


def test_table_defaults_are_valid():
    for params in (JointGeometry(), SoaParams(), DynamicParams(),
                   PlatformParams()):
        assert validate(params) == []


def test_pentagon_anchor_angles():
    anchors = derive_anchors(JointGeometry())
    radius = 45.87e-3 / 2.0
    expected_deg = [90.0, 162.0, 234.0, 306.0, 18.0]
    for anchor, want in zip(anchors, expected_deg):
        x, y, z = anchor.point
        assert z == 0.0
        assert math.hypot(x, y) == pytest.approx(radius, rel=1e-12)
        got = math.degrees(math.atan2(y, x)) % 360.0
        assert got == pytest.approx(want, abs=1e-9)


def test_single_actuator_sits_on_plus_y():
    anchors = derive_anchors(JointGeometry(n_act=1))
    assert len(anchors) == 1
    x, y, z = anchors[0].point
    assert x == pytest.approx(0.0, abs=1e-15)
    assert y == pytest.approx(45.87e-3 / 2.0, rel=1e-12)


def test_anchor_set_mirror_symmetric():
    anchors = derive_anchors(JointGeometry())
    pts = [a.point for a in anchors]
    for x, y, _ in pts:
        assert any(abs(-x - x2) < 1e-12 and abs(y - y2) < 1e-12
                   for x2, y2, _ in pts)


def test_mirror_symmetry_over_random_geometries():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 8))
        spacing = rng.uniform(0.1, 2.0 * math.pi / n)
        g = JointGeometry(actuator_circle_diameter=rng.uniform(0.01, 0.2),
                          actuator_spacing=spacing, n_act=n)
        pts = [a.point for a in derive_anchors(g)]
        for x, y, _ in pts:
            assert any(abs(-x - x2) < 1e-12 and abs(y - y2) < 1e-12
                       for x2, y2, _ in pts)
        assert abs(sum(x for x, _, _ in pts)) < 1e-12


def test_validation_reports_nonpositive_diameter():
    bad = JointGeometry(actuator_circle_diameter=0.0)
    assert any("actuator_circle_diameter" in v for v in validate(bad))


def test_validation_flags_pressure_ceiling():
    bad = SoaParams(p_max=7.0e5)
    assert any("6 bar" in v for v in validate(bad))


def test_validation_flags_vacuum_floor():
    bad = SoaParams(p_min=-1.2e5)
    assert any("vacuum" in v for v in validate(bad))


def test_short_rod_warns_but_passes():
    with pytest.warns(UserWarning):
        g = JointGeometry(arc_length=30e-3)
        assert validate(g) == []


def test_validate_rejects_unknown_types():
    with pytest.raises(TypeError):
        validate(object())


def test_soa_area_default_matches_circumcircle():
    d = ACTUATOR_GEOMETRY_MM["circumcircle_diameter"] * 1e-3
    assert SoaParams().area == pytest.approx(math.pi * (d / 2.0) ** 2,
                                             rel=1e-12)
    assert SoaParams().area == pytest.approx(4.824e-4, rel=1e-3)


def test_dynamic_defaults():
    dyn = DynamicParams()
    assert dyn.inertia == pytest.approx(dyn.mass * dyn.arc_length ** 2 / 12.0)
    assert dyn.area_moment == pytest.approx(math.pi * 6e-3 ** 4 / 64.0)
    assert DynamicParams(gravity=0.0).violations() == []


def test_spacing_over_full_circle_rejected():
    bad = JointGeometry(actuator_spacing=math.radians(80.0), n_act=5)
    assert any("full circle" in v for v in validate(bad))


def test_platform_couplings():
    p = PlatformParams()
    assert p.tail_coupling == pytest.approx(
        p.tail_inertia + p.tail_mass * p.tail_arm ** 2)
    assert p.total_coupling == pytest.approx(
        p.body_inertia + p.body_mass * p.body_arm ** 2 + p.tail_coupling)
