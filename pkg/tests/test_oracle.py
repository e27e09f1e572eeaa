"""Tests for the invariant suite and the oracle survey."""

import logging

import numpy as np
import pytest

from line_voxelizer import oracle
from line_voxelizer.geometry import segment_length
from line_voxelizer.models import Segment, VoxelChain
from line_voxelizer.oracle import (
    chain_violations,
    count_skippable,
    interior_violations,
    random_segments,
    random_segments_of_length,
    run_oracle_survey,
)
from line_voxelizer.parametric import voxelize_parametric
from line_voxelizer.reference import voxelize_walk


def chain_of(seg: Segment, voxels) -> VoxelChain:
    return VoxelChain(voxels=np.array(voxels), source=seg)


def crooked_walk(seg: Segment) -> VoxelChain:
    return chain_of(seg, [(0, 0, 0), (1, 1, 0), (2, 0, 0), (3, 0, 0), (4, 0, 0), (5, 0, 0)])


def records_at(caplog, level: int) -> list[logging.LogRecord]:
    return [r for r in caplog.records if r.name == oracle.__name__ and r.levelno == level]


class TestChainViolations:
    def test_valid_chain(self, diagonal_segment):
        assert chain_violations(voxelize_parametric(diagonal_segment)) == []

    def test_gap(self, axis_segment):
        chain = chain_of(axis_segment, [(0, 0, 0), (1, 0, 0), (3, 0, 0), (4, 0, 0), (5, 0, 0)])
        assert any("26-adjacent" in p for p in chain_violations(chain, check_bounds=False))

    def test_wrong_endpoint(self, axis_segment):
        chain = chain_of(axis_segment, [(0, 0, 0), (1, 0, 0), (2, 0, 0)])
        problems = chain_violations(chain, check_bounds=False)
        assert any(p.startswith("last voxel") for p in problems)

    def test_duplicate(self, axis_segment):
        voxels = [(0, 0, 0), (1, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (4, 0, 0), (5, 0, 0)]
        problems = chain_violations(chain_of(axis_segment, voxels))
        assert "consecutive duplicate voxels" in problems
        assert any(p.startswith("length") for p in problems)

    def test_backtracking(self, axis_segment):
        voxels = [(0, 0, 0), (1, 0, 0), (0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (4, 0, 0), (5, 0, 0)]
        assert "axis x is not monotone" in chain_violations(chain_of(axis_segment, voxels), check_bounds=False)

    def test_distance_bound(self, axis_segment):
        voxels = [(0, 0, 0), (1, 1, 1), (2, 1, 1), (3, 1, 1), (4, 0, 0), (5, 0, 0)]
        problems = chain_violations(chain_of(axis_segment, voxels))
        assert any("from the line" in p for p in problems)

    def test_empty_chain(self, axis_segment):
        assert chain_violations(chain_of(axis_segment, np.empty((0, 3), dtype=np.int32))) == ["chain is empty"]


class TestSkippable:
    def test_corner_is_skippable(self):
        seg = Segment.from_coords(0, 0, 0, 1, 1, 0)
        chain = chain_of(seg, [(0, 0, 0), (1, 0, 0), (1, 1, 0)])
        assert count_skippable(chain) == 1
        assert interior_violations(chain) == [1]

    def test_minimal_chain(self, planar_segment):
        chain = chain_of(planar_segment, [(0, 0, 0), (1, 1, 0), (2, 1, 0)])
        assert count_skippable(chain) == 0
        assert interior_violations(chain) == []

    def test_short_chains(self, point_segment):
        chain = voxelize_parametric(point_segment)
        assert count_skippable(chain) == 0
        assert interior_violations(chain) == []


class TestCorpora:
    def test_random_segments_are_seeded(self):
        assert random_segments(20, seed=3) == random_segments(20, seed=3)
        assert random_segments(20, seed=3) != random_segments(20, seed=4)

    def test_random_segments_bounds(self):
        for seg in random_segments(200, seed=5, bound=10.0):
            assert all(-10.0 <= c <= 10.0 for c in (*seg.start, *seg.end))

    def test_random_segments_of_length(self):
        segments = random_segments_of_length(200, seed=6, max_length=75.0)
        assert len(segments) == 200
        assert all(segment_length(seg) <= 75.0 + 1e-9 for seg in segments)
        assert random_segments_of_length(200, seed=6, max_length=75.0) == segments


class TestOracleSurvey:
    def test_known_segments_agree(self, axis_segment, diagonal_segment, planar_segment, point_segment):
        survey = run_oracle_survey([axis_segment, diagonal_segment, planar_segment, point_segment])
        assert survey.samples == 4
        assert survey.identical == 4
        assert survey.acceptable == 4
        assert survey.counterexamples == []
        assert survey.agreement == 1.0

    def test_counts_are_consistent(self):
        survey = run_oracle_survey(random_segments(200, seed=11))
        assert survey.samples == 200
        assert survey.identical <= survey.acceptable <= survey.samples
        assert len(survey.counterexamples) == survey.failures
        assert 0.0 <= survey.agreement <= 1.0

    def test_counterexample_is_logged(self, axis_segment, monkeypatch, caplog):
        monkeypatch.setattr(oracle, "voxelize_walk", crooked_walk)
        with caplog.at_level(logging.DEBUG, logger="line_voxelizer.oracle"):
            survey = run_oracle_survey([axis_segment])

        assert survey.failures == 1
        [counterexample] = survey.counterexamples
        assert counterexample.segment == axis_segment
        assert [d.index for d in counterexample.differences] == [1]
        [debug] = records_at(caplog, logging.DEBUG)
        assert "counterexample" in debug.getMessage()
        assert "5.0" in debug.getMessage()

    def test_counterexamples_share_one_warning(self, axis_segment, diagonal_segment, monkeypatch, caplog):
        def crooked_axis_only(seg):
            return crooked_walk(seg) if seg == axis_segment else voxelize_walk(seg)

        monkeypatch.setattr(oracle, "voxelize_walk", crooked_axis_only)
        with caplog.at_level(logging.DEBUG, logger="line_voxelizer.oracle"):
            survey = run_oracle_survey([axis_segment, axis_segment, axis_segment, diagonal_segment])

        assert survey.failures == 3
        assert len(records_at(caplog, logging.DEBUG)) == 3
        [warning] = records_at(caplog, logging.WARNING)
        assert "3 counterexamples" in warning.getMessage()
        assert "agreement 25.00%" in warning.getMessage()

    def test_clean_survey_does_not_warn(self, axis_segment, diagonal_segment, caplog):
        with caplog.at_level(logging.DEBUG, logger="line_voxelizer.oracle"):
            run_oracle_survey([axis_segment, diagonal_segment])
        assert records_at(caplog, logging.WARNING) == []
        assert "agreement 100.00%" in caplog.text

    def test_empty_survey(self):
        survey = run_oracle_survey([])
        assert survey.samples == 0
        assert survey.agreement == pytest.approx(1.0)
