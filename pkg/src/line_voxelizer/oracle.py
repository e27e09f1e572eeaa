"""
Chain invariant suite and the parametric-versus-walk survey
"""

import logging
import math

import numpy as np

from line_voxelizer.geometry import line_distances, round_point, segment_length
from line_voxelizer.models import Counterexample, OracleSurvey, Segment, VoxelChain
from line_voxelizer.parametric import chain_length_bounds, voxelize_parametric
from line_voxelizer.reference import chains_equivalent, voxelize_walk

logger = logging.getLogger(__name__)

# Largest distance from a voxel center to a point inside that voxel
DISTANCE_BOUND = math.sqrt(3) / 2 + 1e-9


def chain_violations(chain: VoxelChain, check_bounds: bool = True) -> list[str]:
    """
    Check a chain against the VoxelChain invariants.

    Args:
        chain: Chain to check
        check_bounds: Also check the parametric length and distance bounds

    Returns:
        One message per violated invariant (empty when the chain is valid)
    """
    seg = chain.source
    voxels = chain.voxels.astype(np.int64)
    if len(voxels) == 0:
        return ["chain is empty"]

    problems = []
    if tuple(voxels[0]) != round_point(seg.start):
        problems.append(f"first voxel {tuple(voxels[0])} != round(start) {round_point(seg.start)}")
    if tuple(voxels[-1]) != round_point(seg.end):
        problems.append(f"last voxel {tuple(voxels[-1])} != round(end) {round_point(seg.end)}")

    steps = np.diff(voxels, axis=0)
    if len(steps):
        if np.all(steps == 0, axis=1).any():
            problems.append("consecutive duplicate voxels")
        if (np.abs(steps).max(axis=1) > 1).any():
            problems.append("consecutive voxels are not 26-adjacent")
        for axis, component in enumerate(seg.direction):
            moves = steps[:, axis]
            if (moves < 0).any() if component >= 0 else (moves > 0).any():
                problems.append(f"axis {'xyz'[axis]} is not monotone")

    if check_bounds:
        low, high = chain_length_bounds(seg)
        if not low <= len(voxels) <= high:
            problems.append(f"length {len(voxels)} outside bounds [{low}, {high}]")
        if segment_length(seg) > 0.0:
            worst = float(line_distances(voxels, seg).max())
            if worst > DISTANCE_BOUND:
                problems.append(f"voxel center {worst:.6f} from the line")

    return problems


def count_skippable(chain: VoxelChain) -> int:
    """Interior voxels whose predecessor and successor are already 26-adjacent"""
    voxels = chain.voxels.astype(np.int64)
    if len(voxels) < 3:
        return 0
    return int((np.abs(voxels[2:] - voxels[:-2]).max(axis=1) <= 1).sum())


def interior_violations(chain: VoxelChain) -> list[int]:
    """
    Indices of interior voxels without exactly two adjacent chain voxels.

    Chains are monotone per axis, so a voxel can only touch chain members at
    most two positions away; the check looks at that window.
    """
    voxels = chain.voxels.astype(np.int64)
    n = len(voxels)
    bad = []
    for i in range(1, n - 1):
        window = voxels[max(0, i - 2):min(n, i + 3)]
        gaps = np.abs(window - voxels[i]).max(axis=1)
        if int((gaps == 1).sum()) != 2:
            bad.append(i)
    return bad


def random_segments(count: int, seed: int, bound: float = 50.0) -> list[Segment]:
    """Segments with both endpoints uniform in [-bound, bound]^3"""
    rng = np.random.default_rng(seed)
    coords = rng.uniform(-bound, bound, size=(count, 6))
    return [Segment.from_coords(*row) for row in coords.tolist()]


def random_segments_of_length(count: int, seed: int, max_length: float) -> list[Segment]:
    """Segments with uniform lengths in [0, max_length] and isotropic directions"""
    rng = np.random.default_rng(seed)
    starts = rng.uniform(-max_length, max_length, size=(count, 3))
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    lengths = rng.uniform(0.0, max_length, size=(count, 1))
    ends = starts + directions * lengths
    return [
        Segment.from_coords(*s, *e) for s, e in zip(starts.tolist(), ends.tolist())
    ]


def run_oracle_survey(segments: list[Segment], eps: float = 1e-9) -> OracleSurvey:
    """
    Voxelize every segment with both methods and compare the chains.

    Disagreements that are not distance ties are kept as counterexamples and
    logged at debug level with full-precision inputs. A survey with any
    counterexample ends with one warning that carries the agreement rate.
    The survey also measures skippable voxels in the parametric chains and
    walk chains that leave the parametric length or distance bounds.

    Args:
        segments: Corpus to survey
        eps: Distance tolerance for ties

    Returns:
        OracleSurvey with counts and counterexamples
    """
    survey = OracleSurvey()

    for seg in segments:
        parametric = voxelize_parametric(seg)
        walk = voxelize_walk(seg)
        report = chains_equivalent(parametric, walk, eps)

        survey.samples += 1
        if report.identical:
            survey.identical += 1
        if report.acceptable:
            survey.acceptable += 1
        else:
            survey.counterexamples.append(Counterexample(
                segment=seg,
                parametric=parametric.to_list(),
                walk=walk.to_list(),
                differences=report.differences,
            ))
            logger.debug(
                "parametric/walk counterexample: start=%r end=%r (%d differing voxels)",
                tuple(seg.start), tuple(seg.end), len(report.differences),
            )

        survey.parametric_skippable += count_skippable(parametric)
        if segment_length(seg) > 0.0 and float(line_distances(walk.voxels, seg).max()) > DISTANCE_BOUND:
            survey.walk_distance_excursions += 1
        if len(walk) > chain_length_bounds(seg)[1]:
            survey.walk_length_excursions += 1

    level = logging.WARNING if survey.counterexamples else logging.INFO
    logger.log(
        level,
        "oracle survey: %d samples, %d identical, %d acceptable, %d counterexamples (agreement %.2f%%)",
        survey.samples, survey.identical, survey.acceptable, len(survey.counterexamples),
        100.0 * survey.agreement,
    )
    return survey
