"""
Candidate-walk reference voxelizer.

Steps voxel by voxel from round(S) to round(E); at each step the next voxel
is the octant-directed neighbour whose center lies nearest the line. Slow by
construction: it exists to check the parametric method, not to compete with
it.
"""

import itertools
import logging
from typing import Optional

import numpy as np

from line_voxelizer.errors import ChainMismatchError, NoCandidatesError, WalkDivergedError
from line_voxelizer.geometry import (
    distance_to_line,
    is_adjacent,
    point_line_distance,
    round_point,
    segment_length,
    unit_direction,
)
from line_voxelizer.models import (
    CandidateSet,
    ChainDifference,
    EquivalenceReport,
    Point3,
    ScoredCandidate,
    Segment,
    Voxel,
    VoxelChain,
    WalkStep,
)

logger = logging.getLogger(__name__)

# Distances within this slack of the minimum count as tied
TIE_SLACK = 1e-12


def _sign(value: float) -> int:
    return (value > 0) - (value < 0)


def _octant_deltas(direction: Point3) -> list[tuple[int, int, int]]:
    """Non-zero steps in {0, sign(d_a)} per axis, fewest moving axes first"""
    choices = [(0, _sign(c)) if _sign(c) else (0,) for c in direction]
    deltas = [d for d in itertools.product(*choices) if any(d)]
    deltas.sort(key=lambda d: sum(1 for c in d if c))
    return deltas


def candidate_voxels(current: Voxel, seg: Segment) -> CandidateSet:
    """
    Neighbours of `current` reachable in the direction of E - S.

    Up to seven voxels; every zero direction component pins that axis, so
    planar directions give three candidates and axis-aligned ones give one.

    Raises:
        NoCandidatesError: current already is the end voxel
    """
    current = Voxel(*current)
    if current == round_point(seg.end):
        raise NoCandidatesError(f"voxel {tuple(current)} is already the end voxel")

    return CandidateSet(
        origin=current,
        candidates=[
            Voxel(current.x + dx, current.y + dy, current.z + dz)
            for dx, dy, dz in _octant_deltas(seg.direction)
        ],
    )


def _walk(seg: Segment, trace: Optional[list[WalkStep]] = None) -> list[Voxel]:
    """Greedy nearest-candidate walk, restricted to the rounded-endpoint box"""
    first, last = round_point(seg.start), round_point(seg.end)
    chain = [first]
    if first == last:
        return chain

    dx, dy, dz = seg.direction
    unit = unit_direction(seg)
    deltas = _octant_deltas(seg.direction)
    lo = [min(a, b) for a, b in zip(first, last)]
    hi = [max(a, b) for a, b in zip(first, last)]

    guard = sum(abs(b - a) for a, b in zip(first, last)) + 1
    current = first
    steps = 0

    while current != last:
        steps += 1
        if steps > guard:
            raise WalkDivergedError(
                f"walk exceeded {guard} steps on segment {seg.start} -> {seg.end}"
            )

        scored = []
        for ddx, ddy, ddz in deltas:
            cand = (current[0] + ddx, current[1] + ddy, current[2] + ddz)
            if not all(lo[a] <= cand[a] <= hi[a] for a in range(3)):
                continue
            projection = ddx * dx + ddy * dy + ddz * dz
            scored.append((distance_to_line(cand, seg.start, unit), -projection, cand))

        if not scored:
            raise WalkDivergedError(f"no admissible candidate from {tuple(current)}")

        best = min(s[0] for s in scored)
        tied = [s for s in scored if s[0] <= best + TIE_SLACK]
        chosen = Voxel(*min(tied, key=lambda s: (s[1], s[2]))[2])

        if trace is not None:
            trace.append(WalkStep(
                origin=current,
                chosen=chosen,
                candidates=[ScoredCandidate(voxel=Voxel(*s[2]), distance=s[0]) for s in scored],
            ))

        chain.append(chosen)
        current = chosen

    return chain


def walk_trace(seg: Segment) -> list[WalkStep]:
    """The unpruned greedy walk with every scored candidate, step by step"""
    trace: list[WalkStep] = []
    _walk(seg, trace)
    return trace


def prune_skippable(voxels: list[Voxel]) -> list[Voxel]:
    """
    Remove voxels whose predecessor and successor are themselves adjacent.

    The result keeps its endpoints, connectivity and monotonicity, and every
    interior voxel has exactly two 26-adjacent chain neighbours.
    """
    kept: list[Voxel] = []
    for voxel in voxels:
        while len(kept) >= 2 and is_adjacent(kept[-2], voxel):
            kept.pop()
        kept.append(voxel)
    return kept


def voxelize_walk(seg: Segment) -> VoxelChain:
    """
    Voxelize a segment with the candidate walk.

    Ties between equidistant candidates go to the larger projection on E - S,
    then to the lexicographically smallest voxel.
    """
    voxels = prune_skippable(_walk(seg))
    return VoxelChain(voxels=np.array(voxels, dtype=np.int32), source=seg)


def chains_equivalent(a: VoxelChain, b: VoxelChain, eps: float = 1e-9) -> EquivalenceReport:
    """
    Compare two voxelizations of one segment by their symmetric difference.

    Every voxel held by only one chain is reported at its index, next to the
    other chain's voxel at that index (its alternative). The comparison is
    acceptable only when every such voxel has an alternative and both lie
    within eps of the same distance to the line.

    Raises:
        ChainMismatchError: the chains come from different segments
    """
    if a.source != b.source:
        raise ChainMismatchError("chains voxelize different segments")

    if a == b:
        return EquivalenceReport(identical=True, acceptable=True, eps=eps)

    seg = a.source
    measurable = segment_length(seg) > 0.0

    def distance(voxel: Optional[Voxel]) -> Optional[float]:
        if voxel is None or not measurable:
            return None
        return point_line_distance(voxel, seg)

    voxels_a, voxels_b = a.to_list(), b.to_list()
    only_a = set(voxels_a) - set(voxels_b)
    only_b = set(voxels_b) - set(voxels_a)

    # (index, voxel_a, voxel_b); a swap at one index shows up from both sides
    pairs: dict[tuple, None] = {}
    for index, voxel in enumerate(voxels_a):
        if voxel in only_a:
            other = voxels_b[index] if index < len(voxels_b) else None
            pairs[(index, voxel, other)] = None
    for index, voxel in enumerate(voxels_b):
        if voxel in only_b:
            other = voxels_a[index] if index < len(voxels_a) else None
            pairs[(index, other, voxel)] = None

    differences = [
        ChainDifference(
            index=index,
            voxel_a=voxel_a,
            voxel_b=voxel_b,
            distance_a=distance(voxel_a),
            distance_b=distance(voxel_b),
        )
        for index, voxel_a, voxel_b in sorted(pairs, key=lambda p: p[0])
    ]

    acceptable = all(
        d.is_tie and abs(d.distance_a - d.distance_b) <= eps for d in differences
    )
    logger.debug("chains differ by %d voxels (acceptable=%s)", len(differences), acceptable)

    return EquivalenceReport(
        identical=False,
        acceptable=acceptable,
        eps=eps,
        differences=differences,
    )
