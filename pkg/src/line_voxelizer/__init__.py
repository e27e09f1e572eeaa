"""
Line Voxelizer - parametric and reference voxelization of 3D line segments
"""

__version__ = "1.0.0"

from line_voxelizer.models import (
    BatchPlan,
    BatchResult,
    BenchRecord,
    BenchSettings,
    PartitionConfig,
    Point3,
    Scenario,
    ScenarioKind,
    Segment,
    Voxel,
    VoxelChain,
)
from line_voxelizer.parametric import make_plan, voxelize_parametric
from line_voxelizer.reference import chains_equivalent, voxelize_walk
from line_voxelizer.batch import BatchEngine, batch_preprocess, batch_voxelize
from line_voxelizer.bench import BenchHarness, compute_mvps, run_scenario

__all__ = [
    "BatchEngine",
    "BatchPlan",
    "BatchResult",
    "BenchHarness",
    "BenchRecord",
    "BenchSettings",
    "PartitionConfig",
    "Point3",
    "Scenario",
    "ScenarioKind",
    "Segment",
    "Voxel",
    "VoxelChain",
    "batch_preprocess",
    "batch_voxelize",
    "chains_equivalent",
    "compute_mvps",
    "make_plan",
    "run_scenario",
    "voxelize_parametric",
    "voxelize_walk",
]
