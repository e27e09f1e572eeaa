"""
Data-parallel batch voxelization.

The batch is laid out as a grid of N_P x (N_max + 1) work items, one per
(segment, k) pair. Items with k > N_i are redundant and never write. Segments
are cut into work-groups of `group_size` rows; host threads pull groups from a
shared cursor and write their voxels into disjoint, precomputed slots of one
output buffer. Consecutive repeats are dropped afterwards in an assemble pass,
so the result matches the sequential parametric method exactly.
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from line_voxelizer.errors import CapacityOverflowError, EmptyBatchError, WorkItemRangeError
from line_voxelizer.models import (
    BatchPlan,
    BatchResult,
    BatchTiming,
    ItemCount,
    PartitionConfig,
    Segment,
    Voxel,
    VoxelChain,
)
from line_voxelizer.parametric import make_plan, sample_voxels

logger = logging.getLogger(__name__)

# Upper bound on work items evaluated in one vectorised tile
ITEM_TILE = 1 << 18


def batch_preprocess(segments: list[Segment]) -> BatchPlan:
    """
    Compute N_i, W_i and output offsets for every segment, plus N_max.

    Raises:
        EmptyBatchError: no segments were given
    """
    started = time.perf_counter_ns()
    if not segments:
        raise EmptyBatchError("a batch needs at least one segment")

    plans = [make_plan(seg) for seg in segments]
    step_counts = np.array([p.step_count for p in plans], dtype=np.int64)
    step_vectors = np.array([p.step_vector for p in plans], dtype=np.float64).reshape(-1, 3)
    starts = np.array([seg.start for seg in segments], dtype=np.float64).reshape(-1, 3)
    ends = np.array([seg.end for seg in segments], dtype=np.float64).reshape(-1, 3)

    sizes = step_counts + 1
    offsets = np.zeros(len(segments), dtype=np.int64)
    np.cumsum(sizes[:-1], out=offsets[1:])

    plan = BatchPlan(
        segments=tuple(segments),
        starts=starts,
        ends=ends,
        step_counts=step_counts,
        step_vectors=step_vectors,
        offsets=offsets,
        max_steps=int(step_counts.max()),
        total_voxel_capacity=int(sizes.sum()),
        preprocess_ns=time.perf_counter_ns() - started,
    )
    logger.debug(
        "planned %d segments: N_max=%d, capacity=%d voxels",
        plan.segment_count, plan.max_steps, plan.total_voxel_capacity,
    )
    return plan


def _evaluate(plan: BatchPlan, seg_idx: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Kernel body for a vector of live items"""
    return sample_voxels(
        plan.starts[seg_idx],
        plan.step_vectors[seg_idx],
        plan.ends[seg_idx],
        plan.step_counts[seg_idx],
        k,
    )


def kernel_work_item(plan: BatchPlan, segment_index: int, k: int) -> Optional[Voxel]:
    """
    Evaluate a single work item.

    Returns:
        The voxel of sample k of the segment, or None for a redundant item

    Raises:
        WorkItemRangeError: the item lies outside the batch grid
    """
    if not 0 <= segment_index < plan.segment_count:
        raise WorkItemRangeError(f"segment index {segment_index} outside [0, {plan.segment_count})")
    if not 0 <= k <= plan.max_steps:
        raise WorkItemRangeError(f"step {k} outside [0, {plan.max_steps}]")

    if k > plan.step_counts[segment_index]:
        return None

    voxels = _evaluate(plan, np.array([segment_index]), np.array([k], dtype=np.int64))
    return Voxel(*voxels[0].tolist())


def effective_item_count(plan: BatchPlan) -> ItemCount:
    """Live and redundant items of the N_P x (N_max + 1) grid"""
    live = plan.total_voxel_capacity
    return ItemCount(live=live, redundant=plan.segment_count * (plan.max_steps + 1) - live)


class _GroupCursor:
    """Shared cursor handing out work-group indices"""

    def __init__(self, group_count: int):
        self._next = 0
        self._count = group_count
        self._lock = threading.Lock()

    def next_group(self) -> Optional[int]:
        with self._lock:
            if self._next >= self._count:
                return None
            group = self._next
            self._next += 1
            return group


def _run_group(plan: BatchPlan, group: int, group_size: int, buffer: np.ndarray) -> int:
    """
    Evaluate every item of one work-group and write the live ones.

    Returns:
        Number of redundant items met in the group
    """
    lo = group * group_size
    hi = min(lo + group_size, plan.segment_count)
    counts = plan.step_counts[lo:hi]
    rows = hi - lo
    width = max(1, ITEM_TILE // rows)
    redundant = 0

    for k0 in range(0, plan.max_steps + 1, width):
        k_axis = np.arange(k0, min(k0 + width, plan.max_steps + 1), dtype=np.int64)
        live = k_axis[None, :] <= counts[:, None]
        redundant += live.size - int(np.count_nonzero(live))

        rows_live, cols_live = np.nonzero(live)
        if len(rows_live) == 0:
            continue
        seg_idx = rows_live + lo
        k = k_axis[cols_live]
        slots = plan.offsets[seg_idx] + k
        if slots.max() >= len(buffer):
            raise CapacityOverflowError(
                f"work item slot {int(slots.max())} beyond capacity {len(buffer)}"
            )
        buffer[slots] = _evaluate(plan, seg_idx, k)

    return redundant


def _assemble(plan: BatchPlan, buffer: np.ndarray) -> tuple[tuple[VoxelChain, ...], int]:
    """Drop consecutive repeats per segment and cut the buffer into chains"""
    keep = np.empty(len(buffer), dtype=bool)
    keep[0] = True
    keep[1:] = np.any(buffer[1:] != buffer[:-1], axis=1)
    keep[plan.offsets] = True

    lengths = np.add.reduceat(keep.astype(np.int64), plan.offsets)
    compact = buffer[keep]
    parts = np.split(compact, np.cumsum(lengths)[:-1])
    chains = tuple(
        VoxelChain(voxels=part, source=seg) for part, seg in zip(parts, plan.segments)
    )
    return chains, int(lengths.sum())


def batch_voxelize(plan: BatchPlan, cfg: Optional[PartitionConfig] = None) -> BatchResult:
    """
    Voxelize every segment of a plan on a pool of host threads.

    The output is identical to voxelize_parametric applied to each segment in
    turn, for every group size and worker count.

    Args:
        plan: Output of batch_preprocess
        cfg: Work-group size and thread count (defaults: 64, CPU count)

    Returns:
        BatchResult with chains in input order and per-phase timings

    Raises:
        CapacityOverflowError: live items do not fit the planned buffer
    """
    cfg = cfg or PartitionConfig()
    group_count = cfg.group_count(plan.segment_count)
    workers = min(cfg.worker_count, group_count)

    kernel_started = time.perf_counter_ns()
    buffer = np.empty((plan.total_voxel_capacity, 3), dtype=np.int32)
    cursor = _GroupCursor(group_count)

    def worker() -> int:
        redundant = 0
        group = cursor.next_group()
        while group is not None:
            redundant += _run_group(plan, group, cfg.group_size, buffer)
            group = cursor.next_group()
        return redundant

    if workers == 1:
        redundant = worker()
    else:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="voxel-kernel") as pool:
            futures = [pool.submit(worker) for _ in range(workers)]
            redundant = sum(f.result() for f in futures)
    kernel_ns = time.perf_counter_ns() - kernel_started

    items = effective_item_count(plan)
    if redundant != items.redundant:
        raise CapacityOverflowError(
            f"grid evaluated {redundant} redundant items, expected {items.redundant}"
        )

    assemble_started = time.perf_counter_ns()
    chains, total_voxels = _assemble(plan, buffer)
    assemble_ns = time.perf_counter_ns() - assemble_started

    logger.debug(
        "batch of %d segments in %d groups on %d workers: %d live, %d redundant items",
        plan.segment_count, group_count, workers, items.live, items.redundant,
    )

    return BatchResult(
        chains=chains,
        total_voxels=total_voxels,
        timing=BatchTiming(
            preprocess_ns=plan.preprocess_ns,
            kernel_ns=kernel_ns,
            assemble_ns=assemble_ns,
        ),
        items=items,
    )


class BatchEngine:
    """
    Batch voxelizer bound to one partition configuration.

    Usage:
        engine = BatchEngine(PartitionConfig(group_size=64, worker_count=8))
        result = engine.run(segments)
    """

    def __init__(self, config: Optional[PartitionConfig] = None):
        self.config = config or PartitionConfig()

    def plan(self, segments: list[Segment]) -> BatchPlan:
        return batch_preprocess(segments)

    def run(self, segments: list[Segment]) -> BatchResult:
        """Preprocess and voxelize a list of segments"""
        return batch_voxelize(batch_preprocess(segments), self.config)
