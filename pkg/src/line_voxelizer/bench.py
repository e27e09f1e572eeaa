"""
Benchmark harness for the three workload scenarios.

Each scenario yields parameter points (a segment length or a total voxel
count) with a seeded segment set. Every point is measured with the sequential
method (one voxelize_parametric call per segment) and with the batch engine;
the median of the measured repetitions becomes one BenchRecord.
"""

import logging
import os
import platform
import statistics
import time
from typing import Callable, Iterator, Optional

import numpy as np

from line_voxelizer.batch import batch_preprocess, batch_voxelize
from line_voxelizer.errors import InfeasibleTargetError, InvalidMeasurementError
from line_voxelizer.models import (
    BenchRecord,
    Method,
    PartitionConfig,
    Scenario,
    ScenarioKind,
    Segment,
)
from line_voxelizer.parametric import make_plan, voxelize_parametric

logger = logging.getLogger(__name__)

# Start points are drawn from this cube
START_BOX = 1000.0
MAX_ATTEMPTS = 1000

LENGTH_DISTRIBUTION = "log-uniform on [1, 2 * mean], rescaled to the exact total"


def child_seed(seed: int, *keys: int) -> int:
    """Derive an independent 64-bit seed from a parent seed and integer keys"""
    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def gen_segment_of_length(target_voxels: int, seed: int) -> Segment:
    """
    Seeded segment whose parametric step count is exactly target_voxels.

    The direction is uniform on the sphere and the length is target + 0.5;
    draws whose per-axis extent would raise the step count are redrawn from
    the same generator, so the result is still a pure function of the inputs.

    Raises:
        InfeasibleTargetError: target_voxels < 1 or no draw succeeded
    """
    if target_voxels < 1:
        raise InfeasibleTargetError(f"segment length must be >= 1, got {target_voxels}")

    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        start = rng.uniform(-START_BOX, START_BOX, size=3)
        direction = rng.normal(size=3)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            continue
        end = start + direction / norm * (target_voxels + 0.5)
        seg = Segment.from_coords(*start.tolist(), *end.tolist())
        if make_plan(seg).step_count == target_voxels:
            return seg

    raise InfeasibleTargetError(f"no segment of {target_voxels} steps after {MAX_ATTEMPTS} draws")


def arbitrary_lengths(total_voxels_target: int, segment_count: int, seed: int) -> list[int]:
    """
    Log-uniform lengths between 1 and twice the mean, summing to the target.

    Raises:
        InfeasibleTargetError: fewer voxels than segments
    """
    if segment_count < 1 or total_voxels_target < segment_count:
        raise InfeasibleTargetError(
            f"{total_voxels_target} voxels cannot cover {segment_count} segments"
        )

    rng = np.random.default_rng(seed)
    mean = total_voxels_target / segment_count
    raw = np.exp(rng.uniform(0.0, np.log(2.0 * mean), size=segment_count))
    lengths = np.maximum(1, np.rint(raw * total_voxels_target / raw.sum())).astype(np.int64)

    # Settle the rounding residual one voxel at a time, longest segments first
    residual = total_voxels_target - int(lengths.sum())
    order = np.argsort(-lengths, kind="stable")
    cursor = 0
    while residual != 0:
        idx = order[cursor % segment_count]
        if residual > 0:
            lengths[idx] += 1
            residual -= 1
        elif lengths[idx] > 1:
            lengths[idx] -= 1
            residual += 1
        cursor += 1

    return lengths.tolist()


def gen_arbitrary_batch(total_voxels_target: int, segment_count: int, seed: int) -> list[Segment]:
    """
    Seeded segments of varied lengths whose step counts sum to the target.

    Raises:
        InfeasibleTargetError: total_voxels_target < segment_count
    """
    lengths = arbitrary_lengths(total_voxels_target, segment_count, child_seed(seed, 0))
    return [
        gen_segment_of_length(length, child_seed(seed, 1, i))
        for i, length in enumerate(lengths)
    ]


def compute_mvps(total_voxels: int, elapsed_ms: float) -> float:
    """
    Throughput in mega-voxels per second.

    Raises:
        InvalidMeasurementError: elapsed_ms <= 0 or total_voxels < 0
    """
    if elapsed_ms <= 0:
        raise InvalidMeasurementError(f"elapsed time must be positive, got {elapsed_ms} ms")
    if total_voxels < 0:
        raise InvalidMeasurementError(f"voxel count must be non-negative, got {total_voxels}")
    return total_voxels / (elapsed_ms / 1000.0) / 1e6


def scenario_workloads(s: Scenario) -> Iterator[tuple[int, list[Segment]]]:
    """Yield (parameter, segments) for every parameter point of a scenario"""
    if s.kind == ScenarioKind.SINGLE_SEGMENT:
        for length in s.lengths:
            yield length, [gen_segment_of_length(length, child_seed(s.seed, length))]
    elif s.kind == ScenarioKind.FIXED_BATCH:
        for length in s.lengths:
            yield length, [
                gen_segment_of_length(length, child_seed(s.seed, length, i))
                for i in range(s.segment_count)
            ]
    else:
        yield s.total_voxels_target, gen_arbitrary_batch(
            s.total_voxels_target, s.segment_count, s.seed
        )


def _median_ms(samples_ns: list[int]) -> float:
    return statistics.median(samples_ns) / 1e6


class BenchHarness:
    """
    Runs benchmark scenarios with one partition configuration.

    Measured regions never overlap: the harness itself is single-threaded and
    parallelism only happens inside batch_voxelize.
    """

    def __init__(
        self,
        config: Optional[PartitionConfig] = None,
        on_record: Optional[Callable[[BenchRecord], None]] = None,
    ):
        """
        Initialize the harness.

        Args:
            config: Partition used by the batch method (default PartitionConfig())
            on_record: Called with every record as soon as it is measured
        """
        self.config = config or PartitionConfig()
        self.on_record = on_record

    def _measure_sequential(self, s: Scenario, segments: list[Segment]) -> tuple[float, int]:
        total = 0
        samples = []
        for rep in range(s.warmup + s.repetitions):
            started = time.perf_counter_ns()
            chains = [voxelize_parametric(seg) for seg in segments]
            elapsed = time.perf_counter_ns() - started
            if rep >= s.warmup:
                samples.append(elapsed)
            total = sum(len(c) for c in chains)
        return _median_ms(samples), total

    def _measure_batch(self, s: Scenario, segments: list[Segment]) -> tuple[float, int, dict]:
        total = 0
        samples, preprocess, kernel, assemble = [], [], [], []
        for rep in range(s.warmup + s.repetitions):
            started = time.perf_counter_ns()
            result = batch_voxelize(batch_preprocess(segments), self.config)
            elapsed = time.perf_counter_ns() - started
            if rep >= s.warmup:
                samples.append(elapsed)
                preprocess.append(result.timing.preprocess_ns)
                kernel.append(result.timing.kernel_ns)
                assemble.append(result.timing.assemble_ns)
            total = result.total_voxels
        phases = {
            "preprocess_ms": _median_ms(preprocess),
            "kernel_ms": _median_ms(kernel),
            "assemble_ms": _median_ms(assemble),
        }
        return _median_ms(samples), total, phases

    def _record(self, s: Scenario, parameter: int, method: Method, median_ms: float,
                total: int, planned_steps: int, **phases) -> BenchRecord:
        batch = method == Method.BATCH
        record = BenchRecord(
            scenario=s.label,
            parameter=parameter,
            method=method,
            workers=self.config.worker_count if batch else 1,
            group_size=self.config.group_size if batch else 1,
            median_ms=median_ms,
            total_voxels=total,
            mvps=compute_mvps(total, median_ms),
            planned_steps=planned_steps,
            **phases,
        )
        if self.on_record:
            self.on_record(record)
        return record

    def run_scenario(
        self,
        s: Scenario,
        methods: tuple[Method, ...] = (Method.SEQUENTIAL, Method.BATCH),
    ) -> list[BenchRecord]:
        """
        Measure every parameter point of a scenario.

        Args:
            s: Scenario to run
            methods: Execution methods to measure per parameter point

        Returns:
            One record per (parameter, method), in parameter order
        """
        records = []
        for parameter, segments in scenario_workloads(s):
            logger.debug("measuring %s parameter %d (%d segments)", s.label, parameter, len(segments))
            planned_steps = sum(make_plan(seg).step_count for seg in segments)
            for method in methods:
                if method == Method.SEQUENTIAL:
                    median_ms, total = self._measure_sequential(s, segments)
                    records.append(self._record(s, parameter, method, median_ms, total, planned_steps))
                else:
                    median_ms, total, phases = self._measure_batch(s, segments)
                    records.append(self._record(s, parameter, method, median_ms, total, planned_steps, **phases))
        return records


def run_scenario(s: Scenario, cfg: Optional[PartitionConfig] = None) -> list[BenchRecord]:
    """Measure a scenario with both methods under one partition configuration"""
    return BenchHarness(cfg).run_scenario(s)


def report_metadata(s: Scenario, cfg: PartitionConfig, scale: float = 1.0) -> dict:
    """Descriptive metadata stored alongside the JSON report"""
    metadata = {
        "scenario": s.label,
        "seed": s.seed,
        "repetitions": s.repetitions,
        "warmup": s.warmup,
        "scale": scale,
        "segment_count": s.segment_count,
        "workers": cfg.worker_count,
        "group_size": cfg.group_size,
        "hardware_parallelism": os.cpu_count() or 1,
        "platform": platform.platform(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    if s.kind == ScenarioKind.ARBITRARY_BATCH:
        metadata["total_voxels_target"] = s.total_voxels_target
        metadata["length_distribution"] = LENGTH_DISTRIBUTION
    else:
        metadata["lengths"] = list(s.lengths)
    return metadata
