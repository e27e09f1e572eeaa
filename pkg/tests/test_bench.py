"""Tests for workload generation and the benchmark harness."""

import os
import statistics

import pytest

from line_voxelizer.batch import batch_preprocess, batch_voxelize
from line_voxelizer.bench import (
    BenchHarness,
    arbitrary_lengths,
    child_seed,
    compute_mvps,
    gen_arbitrary_batch,
    gen_segment_of_length,
    report_metadata,
    run_scenario,
    scenario_workloads,
)
from line_voxelizer.errors import InfeasibleTargetError, InvalidMeasurementError
from line_voxelizer.models import (
    BenchSettings,
    Method,
    PartitionConfig,
    Scenario,
    ScenarioKind,
)
from line_voxelizer.parametric import make_plan

requires_four_cpus = pytest.mark.skipif(
    (os.cpu_count() or 1) < 4, reason="needs at least 4 hardware threads"
)


class TestComputeMvps:
    def test_published_sequential_cell(self):
        assert compute_mvps(10**9, 119729.2) == pytest.approx(8.4, abs=0.05)

    def test_published_batch_cell(self):
        assert compute_mvps(10**9, 4071.01) == pytest.approx(245.7, abs=0.1)

    def test_formula(self):
        assert compute_mvps(2_000_000, 1000.0) == pytest.approx(2.0)
        assert compute_mvps(0, 5.0) == 0.0

    @pytest.mark.parametrize("total, ms", [(10, 0.0), (10, -1.0), (-1, 1.0)])
    def test_invalid_measurement(self, total, ms):
        with pytest.raises(InvalidMeasurementError):
            compute_mvps(total, ms)


class TestSegmentGeneration:
    @pytest.mark.parametrize("target", [1, 2, 7, 20, 1000, 50_000])
    def test_exact_step_count(self, target):
        for seed in range(3):
            assert make_plan(gen_segment_of_length(target, seed)).step_count == target

    def test_deterministic(self):
        assert gen_segment_of_length(500, 42) == gen_segment_of_length(500, 42)
        assert gen_segment_of_length(500, 42) != gen_segment_of_length(500, 43)

    def test_infeasible_target(self):
        with pytest.raises(InfeasibleTargetError):
            gen_segment_of_length(0, 1)

    def test_child_seeds_differ(self):
        seeds = {child_seed(7, i) for i in range(100)}
        assert len(seeds) == 100
        assert child_seed(7, 3) == child_seed(7, 3)
        assert all(0 <= s < 2**64 for s in seeds)


class TestArbitraryBatch:
    @pytest.mark.parametrize("total, count", [(10_000, 1024), (1024, 1024), (123_457, 33)])
    def test_lengths_sum_to_target(self, total, count):
        lengths = arbitrary_lengths(total, count, seed=9)
        assert len(lengths) == count
        assert sum(lengths) == total
        assert min(lengths) >= 1

    def test_lengths_vary(self):
        lengths = arbitrary_lengths(100_000, 256, seed=9)
        assert max(lengths) > 2 * min(lengths)

    def test_infeasible(self):
        with pytest.raises(InfeasibleTargetError):
            arbitrary_lengths(10, 11, seed=0)
        with pytest.raises(InfeasibleTargetError):
            gen_arbitrary_batch(10, 11, seed=0)

    def test_step_total(self):
        segments = gen_arbitrary_batch(5_000, 64, seed=7)
        assert len(segments) == 64
        total = sum(make_plan(seg).step_count for seg in segments)
        assert abs(total - 5_000) <= 5
        assert gen_arbitrary_batch(5_000, 64, seed=7) == segments


class TestScenarios:
    def test_desk_scale_defaults(self):
        single = BenchSettings().scenario(ScenarioKind.SINGLE_SEGMENT)
        assert single.lengths[0] == 1_000 and single.lengths[-1] == 1_000_000
        fixed = BenchSettings().scenario(ScenarioKind.FIXED_BATCH)
        assert fixed.segment_count == 1024
        arbitrary = BenchSettings().scenario(ScenarioKind.ARBITRARY_BATCH)
        assert arbitrary.total_voxels_target == 10**7

    def test_scale(self):
        single = BenchSettings(scale=0.001).scenario(ScenarioKind.SINGLE_SEGMENT, seed=3)
        assert single.lengths == [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]
        assert single.seed == 3
        fixed = BenchSettings(scale=0.01).scenario(ScenarioKind.FIXED_BATCH)
        assert len(set(fixed.lengths)) == len(fixed.lengths)
        assert min(fixed.lengths) >= 1
        arbitrary = BenchSettings(scale=1e-9).scenario(ScenarioKind.ARBITRARY_BATCH)
        assert arbitrary.total_voxels_target == arbitrary.segment_count

    def test_validation(self):
        with pytest.raises(ValueError):
            BenchSettings(scale=0.0)
        with pytest.raises(ValueError):
            Scenario(kind=ScenarioKind.FIXED_BATCH, lengths=[0, 5])
        with pytest.raises(ValueError):
            Scenario(kind=ScenarioKind.FIXED_BATCH, repetitions=0)

    def test_workloads(self):
        scenario = Scenario(kind=ScenarioKind.FIXED_BATCH, lengths=[10, 30], segment_count=4)
        workloads = list(scenario_workloads(scenario))
        assert [p for p, _ in workloads] == [10, 30]
        for parameter, segments in workloads:
            assert len(segments) == 4
            assert all(make_plan(seg).step_count == parameter for seg in segments)


class TestHarness:
    @pytest.fixture
    def scenario(self):
        return Scenario(
            kind=ScenarioKind.FIXED_BATCH, lengths=[10, 25], segment_count=8,
            seed=5, repetitions=2, warmup=1,
        )

    def test_records(self, scenario):
        seen = []
        cfg = PartitionConfig(group_size=4, worker_count=2)
        records = BenchHarness(cfg, on_record=seen.append).run_scenario(scenario)

        assert seen == records
        assert [(r.parameter, r.method) for r in records] == [
            (10, Method.SEQUENTIAL), (10, Method.BATCH), (25, Method.SEQUENTIAL), (25, Method.BATCH),
        ]
        for record in records:
            assert record.scenario == "fixed_batch"
            assert record.mvps == pytest.approx(compute_mvps(record.total_voxels, record.median_ms), rel=1e-6)
            assert record.planned_steps == record.parameter * 8

        sequential, batch = records[0], records[1]
        assert (sequential.workers, sequential.group_size) == (1, 1)
        assert (batch.workers, batch.group_size) == (2, 4)
        assert sequential.total_voxels == batch.total_voxels
        assert sequential.kernel_ms is None
        assert batch.kernel_ms is not None and batch.kernel_ms > 0

    def test_run_scenario_function(self):
        scenario = Scenario(kind=ScenarioKind.SINGLE_SEGMENT, lengths=[40], repetitions=1, warmup=0)
        records = run_scenario(scenario, PartitionConfig(worker_count=1))
        assert len(records) == 2
        assert {r.method for r in records} == {Method.SEQUENTIAL, Method.BATCH}

    def test_arbitrary_parameter(self):
        scenario = Scenario(
            kind=ScenarioKind.ARBITRARY_BATCH, segment_count=16, total_voxels_target=800,
            seed=7, repetitions=1, warmup=0,
        )
        records = BenchHarness(PartitionConfig(worker_count=1)).run_scenario(scenario)
        assert all(r.parameter == 800 for r in records)
        assert all(r.planned_steps == 800 for r in records)

    def test_metadata(self):
        cfg = PartitionConfig(group_size=64, worker_count=3)
        arbitrary = BenchSettings(scale=0.01).scenario(ScenarioKind.ARBITRARY_BATCH, seed=7)
        metadata = report_metadata(arbitrary, cfg, scale=0.01)
        assert metadata["seed"] == 7
        assert metadata["workers"] == 3
        assert metadata["hardware_parallelism"] >= 1
        assert "log-uniform" in metadata["length_distribution"]
        single = BenchSettings(scale=0.001).scenario(ScenarioKind.SINGLE_SEGMENT)
        assert report_metadata(single, cfg)["lengths"] == single.lengths


def _median_batch_ms(segments, cfg, repetitions=5):
    plan = batch_preprocess(segments)
    batch_voxelize(plan, cfg)
    samples = []
    for _ in range(repetitions):
        result = batch_voxelize(plan, cfg)
        samples.append(result.timing.kernel_ns + result.timing.assemble_ns)
    return statistics.median(samples) / 1e6


@pytest.mark.slow
@requires_four_cpus
def test_batch_amortizes_per_voxel_cost():
    scenario = Scenario(
        kind=ScenarioKind.FIXED_BATCH, lengths=[1000], segment_count=1024, repetitions=3, warmup=1,
    )
    sequential, batch = BenchHarness(PartitionConfig()).run_scenario(scenario)
    assert batch.median_ms / batch.total_voxels < sequential.median_ms / sequential.total_voxels


@pytest.mark.slow
@requires_four_cpus
def test_four_workers_beat_one_on_arbitrary_batch():
    segments = gen_arbitrary_batch(10**7, 1024, seed=0)
    one = _median_batch_ms(segments, PartitionConfig(worker_count=1))
    four = _median_batch_ms(segments, PartitionConfig(worker_count=4))
    assert four <= 0.75 * one
