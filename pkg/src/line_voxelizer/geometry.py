"""
Geometric primitives shared by every voxelizer
"""

import math

import numpy as np

from line_voxelizer.errors import CoordinateRangeError, DegenerateSegmentError
from line_voxelizer.models import INT32_MAX, INT32_MIN, Point3, Segment, Voxel


def segment_length(seg: Segment) -> float:
    """Euclidean norm of E - S"""
    return math.dist(seg.start, seg.end)


def round_half_away(points: np.ndarray) -> np.ndarray:
    """
    Round every coordinate to the nearest integer, ties away from zero.

    `x - trunc(x)` is exact in binary floating point, so the tie test never
    sees a rounded fraction. Used by both the sequential and the batch sampler
    so their outputs stay bit-identical.

    Raises:
        CoordinateRangeError: a coordinate is non-finite or outside int32
    """
    points = np.asarray(points, dtype=np.float64)
    truncated = np.trunc(points)
    fraction = points - truncated
    rounded = truncated + np.where(np.abs(fraction) >= 0.5, np.sign(points), 0.0)

    if rounded.size and not (
        np.isfinite(rounded).all()
        and rounded.min() >= INT32_MIN
        and rounded.max() <= INT32_MAX
    ):
        raise CoordinateRangeError("coordinate outside the signed 32-bit voxel lattice")

    return rounded.astype(np.int32)


def round_point(p: Point3) -> Voxel:
    """Map a continuous point to the voxel whose center is nearest"""
    return Voxel(*round_half_away(np.array(p, dtype=np.float64)).tolist())


def unit_direction(seg: Segment) -> Point3:
    """
    (E - S) / |E - S|, computed without overflow or underflow.

    Raises:
        DegenerateSegmentError: seg has zero length
    """
    dx, dy, dz = seg.direction
    norm = math.hypot(dx, dy, dz)
    if norm == 0.0:
        raise DegenerateSegmentError("a zero-length segment has no direction")
    return Point3(dx / norm, dy / norm, dz / norm)


def distance_to_line(p, origin: Point3, unit: Point3) -> float:
    """Distance from p to the line through origin along a unit vector"""
    px = p[0] - origin[0]
    py = p[1] - origin[1]
    pz = p[2] - origin[2]
    cx = py * unit[2] - pz * unit[1]
    cy = pz * unit[0] - px * unit[2]
    cz = px * unit[1] - py * unit[0]
    return math.hypot(cx, cy, cz)


def point_line_distance(p: Point3, seg: Segment) -> float:
    """
    Perpendicular distance from p to the infinite line through seg.

    Raises:
        DegenerateSegmentError: seg has zero length
    """
    return distance_to_line(p, seg.start, unit_direction(seg))


def line_distances(points: np.ndarray, seg: Segment) -> np.ndarray:
    """Vectorised point_line_distance for an (n, 3) array of points"""
    unit = np.array(unit_direction(seg), dtype=np.float64)
    offsets = np.asarray(points, dtype=np.float64).reshape(-1, 3) - np.array(seg.start)
    cross = np.cross(offsets, unit)
    return np.sqrt(np.einsum("ij,ij->i", cross, cross))


def is_adjacent(a: Voxel, b: Voxel) -> bool:
    """26-adjacency: distinct voxels differing by at most 1 per axis"""
    return a != b and max(abs(a[0] - b[0]), abs(a[1] - b[1]), abs(a[2] - b[2])) <= 1
