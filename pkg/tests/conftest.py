import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tailsim.params import (DynamicParams, JointGeometry, PlatformParams,
                            SoaParams, derive_anchors)

SEGMENT_ARC = 3 * 36.51e-3


@pytest.fixture(scope="session")
def geom():
    """Lumped three-joint segment treated as one bending element."""
    return JointGeometry(arc_length=SEGMENT_ARC)


@pytest.fixture(scope="session")
def joint_geom():
    """Single joint with the as-built defaults."""
    return JointGeometry()


@pytest.fixture(scope="session")
def soa():
    return SoaParams()


@pytest.fixture(scope="session")
def dyn():
    return DynamicParams(gravity=0.0)


@pytest.fixture(scope="session")
def dyn_gravity():
    return DynamicParams()


@pytest.fixture(scope="session")
def plat():
    return PlatformParams(gravity=0.0)


@pytest.fixture(scope="session")
def anchors(geom):
    return derive_anchors(geom)


@pytest.fixture(scope="session")
def anchors_xy(anchors):
    import numpy as np

    return np.array([[a.point[0], a.point[1]] for a in anchors])
