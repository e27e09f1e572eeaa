"""
Shared fixtures for the line voxelizer tests
"""

import numpy as np
import pytest

from line_voxelizer.models import Segment
from line_voxelizer.oracle import random_segments_of_length
from line_voxelizer.parametric import make_plan


@pytest.fixture
def axis_segment() -> Segment:
    return Segment.from_coords(0, 0, 0, 5, 0, 0)


@pytest.fixture
def diagonal_segment() -> Segment:
    return Segment.from_coords(0, 0, 0, 3, 3, 3)


@pytest.fixture
def planar_segment() -> Segment:
    return Segment.from_coords(0, 0, 0, 2, 1, 0)


@pytest.fixture
def point_segment() -> Segment:
    return Segment.from_coords(2, -1, 7, 2, -1, 7)


@pytest.fixture(scope="session")
def mixed_batch() -> list[Segment]:
    """Seeded 1024-segment batch with lengths between 0 and 300 voxels"""
    return random_segments_of_length(1024, seed=20180415, max_length=300.0)


def clear_of_ties(seg: Segment, margin: float = 1e-6) -> bool:
    """True when no parametric sample sits within `margin` of a rounding tie"""
    plan = make_plan(seg)
    k = np.arange(plan.step_count + 1, dtype=np.float64)[:, None]
    points = np.array(seg.start) + np.array(plan.step_vector) * k
    points[-1] = seg.end
    fraction = np.abs(points - np.trunc(points))
    return bool(np.all(np.abs(fraction - 0.5) > margin))


@pytest.fixture(scope="session")
def tie_free():
    return clear_of_ties
