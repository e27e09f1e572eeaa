"""
Parametric voxelization of 3D line segments.

Samples G_k = S + W * k for k = 0..N, rounds each sample to its voxel and
drops consecutive repeats. Every sample depends only on (S, W, k), which is
what lets the batch engine evaluate them as independent work items.
"""

import math

import numpy as np

from line_voxelizer.geometry import round_half_away, round_point, segment_length
from line_voxelizer.models import ParametricPlan, Point3, Segment, VoxelChain


def make_plan(seg: Segment) -> ParametricPlan:
    """
    Compute the step count N and the step vector W for a segment.

    N starts from int(|E - S|) and is raised to the largest per-axis extent
    and to the largest rounded-endpoint span, so |W_a| <= 1 on every axis and
    consecutive samples never skip a voxel. Segments whose endpoints share a
    voxel get N = 0 and W = 0.

    Args:
        seg: The segment to plan

    Returns:
        ParametricPlan with step_count N and step_vector W
    """
    first, last = round_point(seg.start), round_point(seg.end)
    if first == last:
        return ParametricPlan(step_count=0, step_vector=Point3(0.0, 0.0, 0.0))

    direction = seg.direction
    span = max(abs(b - a) for a, b in zip(first, last))
    extent = max(abs(c) for c in direction)
    steps = max(math.floor(segment_length(seg)), math.ceil(extent), span, 1)

    return ParametricPlan(
        step_count=steps,
        step_vector=Point3(direction.x / steps, direction.y / steps, direction.z / steps),
    )


def sample_voxels(
    starts: np.ndarray,
    steps: np.ndarray,
    ends: np.ndarray,
    counts,
    k: np.ndarray,
) -> np.ndarray:
    """
    Evaluate round(S + W * k) for a set of samples.

    `starts`, `steps` and `ends` broadcast against k (one row per sample, or a
    single row shared by all). The sample with k == N is pinned to E.

    Returns:
        (n, 3) int32 array of voxel indices
    """
    points = starts + steps * k.astype(np.float64)[:, None]
    pinned = np.where((k == counts)[:, None], ends, points)
    return round_half_away(pinned)


def dedupe_consecutive(voxels: np.ndarray) -> np.ndarray:
    """Drop rows equal to their predecessor"""
    if len(voxels) <= 1:
        return voxels
    keep = np.empty(len(voxels), dtype=bool)
    keep[0] = True
    keep[1:] = np.any(voxels[1:] != voxels[:-1], axis=1)
    return voxels[keep]


def voxelize_parametric(seg: Segment) -> VoxelChain:
    """
    Voxelize a segment with the parametric method.

    Zero-length and sub-voxel segments yield a single-voxel chain.

    Raises:
        CoordinateRangeError: a sample falls outside the int32 lattice
    """
    plan = make_plan(seg)
    k = np.arange(plan.step_count + 1, dtype=np.int64)
    voxels = sample_voxels(
        np.array(seg.start, dtype=np.float64),
        np.array(plan.step_vector, dtype=np.float64),
        np.array(seg.end, dtype=np.float64),
        plan.step_count,
        k,
    )
    return VoxelChain(voxels=dedupe_consecutive(voxels), source=seg)


def chain_length_bounds(seg: Segment) -> tuple[int, int]:
    """
    Inclusive bounds on the parametric chain length.

    The minimum is the count of a minimal 26-connected chain between the
    rounded endpoints; the maximum is one voxel per sample.
    """
    first, last = round_point(seg.start), round_point(seg.end)
    span = max(abs(b - a) for a, b in zip(first, last))
    return span + 1, make_plan(seg).step_count + 1
