"""
Data models for the line voxelizer
"""

import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


class Point3(NamedTuple):
    """Continuous point in voxel-grid units (one unit = one voxel edge)"""
    x: float
    y: float
    z: float


class Voxel(NamedTuple):
    """Integer lattice index of a unit cube"""
    x: int
    y: int
    z: int


class VoxelMethod(str, Enum):
    """Single-segment voxelization algorithms"""
    PARAMETRIC = "parametric"
    WALK = "walk"


class VoxelFormat(str, Enum):
    """Voxel output formats"""
    XYZ = "xyz"
    VOX3 = "vox3"


class ScenarioKind(str, Enum):
    """Benchmark workload shapes"""
    SINGLE_SEGMENT = "single_segment"
    FIXED_BATCH = "fixed_batch"
    ARBITRARY_BATCH = "arbitrary_batch"


class Method(str, Enum):
    """How a benchmark workload is executed"""
    SEQUENTIAL = "sequential"
    BATCH = "batch"


class Segment(BaseModel):
    """Ordered pair of endpoints S (start) and E (end)"""
    model_config = ConfigDict(frozen=True)

    start: Point3
    end: Point3

    @field_validator("start", "end")
    @classmethod
    def _finite(cls, point: Point3) -> Point3:
        if not all(math.isfinite(c) for c in point):
            raise ValueError(f"segment endpoint must be finite, got {tuple(point)}")
        return point

    @classmethod
    def from_coords(
        cls, sx: float, sy: float, sz: float, ex: float, ey: float, ez: float
    ) -> "Segment":
        """Build a segment from six scalar coordinates"""
        return cls(start=Point3(sx, sy, sz), end=Point3(ex, ey, ez))

    @property
    def direction(self) -> Point3:
        """E - S"""
        return Point3(
            self.end.x - self.start.x,
            self.end.y - self.start.y,
            self.end.z - self.start.z,
        )

    def reversed(self) -> "Segment":
        return Segment(start=self.end, end=self.start)


class ParametricPlan(BaseModel):
    """Step count N and step vector W = (E - S) / N of the parametric sampler"""
    model_config = ConfigDict(frozen=True)

    step_count: int = Field(ge=0)
    step_vector: Point3


@dataclass(frozen=True, eq=False)
class VoxelChain:
    """
    Ordered, duplicate-free voxel sequence approximating one segment.

    Voxels are held as a read-only (n, 3) int32 array so large chains stay
    compact; iteration and indexing yield Voxel tuples.
    """
    voxels: np.ndarray
    source: Segment

    def __post_init__(self):
        arr = np.ascontiguousarray(self.voxels, dtype=np.int32).reshape(-1, 3)
        arr.flags.writeable = False
        object.__setattr__(self, "voxels", arr)

    def __len__(self) -> int:
        return int(self.voxels.shape[0])

    def __iter__(self) -> Iterator[Voxel]:
        for row in self.voxels.tolist():
            yield Voxel(*row)

    def __getitem__(self, index: int) -> Voxel:
        return Voxel(*self.voxels[index].tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VoxelChain):
            return NotImplemented
        return self.source == other.source and np.array_equal(self.voxels, other.voxels)

    @property
    def first(self) -> Voxel:
        return self[0]

    @property
    def last(self) -> Voxel:
        return self[-1]

    def to_list(self) -> list[Voxel]:
        return list(self)


class CandidateSet(BaseModel):
    """Octant-directed neighbours considered by one walk step"""
    origin: Voxel
    candidates: list[Voxel]


class ChainDifference(BaseModel):
    """One index at which two chains of the same segment disagree"""
    index: int
    voxel_a: Optional[Voxel] = None
    voxel_b: Optional[Voxel] = None
    distance_a: Optional[float] = None
    distance_b: Optional[float] = None

    @property
    def is_tie(self) -> bool:
        return self.distance_a is not None and self.distance_b is not None


class EquivalenceReport(BaseModel):
    """Result of comparing two voxelizations of one segment"""
    identical: bool
    acceptable: bool
    eps: float
    differences: list[ChainDifference] = Field(default_factory=list)


class Counterexample(BaseModel):
    """A segment on which the parametric chain and the walk chain disagree beyond ties"""
    segment: Segment
    parametric: list[Voxel]
    walk: list[Voxel]
    differences: list[ChainDifference]


class OracleSurvey(BaseModel):
    """Aggregate comparison of the parametric method against the walk oracle"""
    samples: int = 0
    identical: int = 0
    acceptable: int = 0
    counterexamples: list[Counterexample] = Field(default_factory=list)

    # Minimality and bound measurements
    parametric_skippable: int = 0
    walk_distance_excursions: int = 0
    walk_length_excursions: int = 0

    @property
    def failures(self) -> int:
        return self.samples - self.acceptable

    @property
    def agreement(self) -> float:
        return self.acceptable / self.samples if self.samples else 1.0


def default_worker_count() -> int:
    """Hardware parallelism of the host"""
    return os.cpu_count() or 1


class PartitionConfig(BaseModel):
    """Work-group shape (N_TH items per group) and host thread count"""
    model_config = ConfigDict(frozen=True)

    group_size: int = Field(default=64, ge=1)
    worker_count: int = Field(default_factory=default_worker_count, ge=1)

    def group_count(self, segment_count: int) -> int:
        """Number of groups needed to cover segment_count segments"""
        return -(-segment_count // self.group_size)


class SegmentPlan(BaseModel):
    """Per-segment entry of a batch plan"""
    step_count: int
    step_vector: Point3
    output_offset: int


@dataclass(frozen=True)
class BatchPlan:
    """
    Preprocessed batch: per-segment N_i, W_i and output offsets plus N_max.

    Arrays are indexed by segment position; offsets partition the output
    buffer [0, total_voxel_capacity) into N_i + 1 slots per segment.
    """
    segments: tuple[Segment, ...]
    starts: np.ndarray
    ends: np.ndarray
    step_counts: np.ndarray
    step_vectors: np.ndarray
    offsets: np.ndarray
    max_steps: int
    total_voxel_capacity: int
    preprocess_ns: int = 0

    @property
    def segment_count(self) -> int:
        return len(self.segments)

    @property
    def per_segment(self) -> list[SegmentPlan]:
        return [
            SegmentPlan(
                step_count=int(n),
                step_vector=Point3(*w),
                output_offset=int(o),
            )
            for n, w, o in zip(
                self.step_counts.tolist(), self.step_vectors.tolist(), self.offsets.tolist()
            )
        ]


class ItemCount(BaseModel):
    """Live versus redundant work items of a batch grid"""
    live: int
    redundant: int


class BatchTiming(BaseModel):
    """Per-phase durations of one batch run, in nanoseconds"""
    preprocess_ns: int = 0
    kernel_ns: int = 0
    assemble_ns: int = 0

    @property
    def total_ns(self) -> int:
        return self.preprocess_ns + self.kernel_ns + self.assemble_ns


@dataclass(frozen=True)
class BatchResult:
    """Chains in input order plus accounting for one batch run"""
    chains: tuple[VoxelChain, ...]
    total_voxels: int
    timing: BatchTiming
    items: ItemCount


class Scenario(BaseModel):
    """One benchmark workload definition"""
    kind: ScenarioKind
    lengths: list[int] = Field(default_factory=list)
    segment_count: int = Field(default=1024, ge=1)
    total_voxels_target: int = Field(default=10**7, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    repetitions: int = Field(default=5, ge=1)
    warmup: int = Field(default=2, ge=0)

    @field_validator("lengths")
    @classmethod
    def _positive_lengths(cls, lengths: list[int]) -> list[int]:
        if any(length < 1 for length in lengths):
            raise ValueError("scenario lengths must all be >= 1")
        return lengths

    @property
    def label(self) -> str:
        return self.kind.value


class BenchRecord(BaseModel):
    """One row of a benchmark report"""
    scenario: str
    parameter: int
    method: Method
    workers: int
    group_size: int
    median_ms: float
    total_voxels: int
    mvps: float

    # Sum of parametric step counts N_i over the workload (JSON report only)
    planned_steps: Optional[int] = None

    # Batch phase medians (JSON report only)
    preprocess_ms: Optional[float] = None
    kernel_ms: Optional[float] = None
    assemble_ms: Optional[float] = None


class ScoredCandidate(BaseModel):
    """A walk candidate with its distance to the line"""
    voxel: Voxel
    distance: float


class WalkStep(BaseModel):
    """One greedy step of the candidate walk"""
    origin: Voxel
    chosen: Voxel
    candidates: list[ScoredCandidate]


class BenchSettings(BaseModel):
    """Default desk-scale parameter points for each scenario kind"""
    single_lengths: list[int] = Field(default_factory=lambda: [
        1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000, 200_000, 500_000, 1_000_000,
    ])
    fixed_lengths: list[int] = Field(default_factory=lambda: [
        20, 50, 100, 1_000, 2_000, 5_000, 10_000, 20_000,
    ])
    fixed_segment_count: int = Field(default=1024, ge=1)
    arbitrary_total: int = Field(default=10**7, ge=1)
    arbitrary_segment_count: int = Field(default=1024, ge=1)
    scale: float = Field(default=1.0, gt=0.0)

    def _scaled(self, values: list[int]) -> list[int]:
        scaled = [max(1, round(v * self.scale)) for v in values]
        return list(dict.fromkeys(scaled))

    def scenario(
        self,
        kind: ScenarioKind,
        seed: int = 0,
        repetitions: int = 5,
        warmup: int = 2,
    ) -> Scenario:
        """Build a scenario of the given kind at this scale"""
        if kind == ScenarioKind.SINGLE_SEGMENT:
            return Scenario(
                kind=kind, lengths=self._scaled(self.single_lengths), segment_count=1,
                seed=seed, repetitions=repetitions, warmup=warmup,
            )
        if kind == ScenarioKind.FIXED_BATCH:
            return Scenario(
                kind=kind, lengths=self._scaled(self.fixed_lengths),
                segment_count=self.fixed_segment_count,
                seed=seed, repetitions=repetitions, warmup=warmup,
            )
        return Scenario(
            kind=kind,
            segment_count=self.arbitrary_segment_count,
            total_voxels_target=max(
                self.arbitrary_segment_count, round(self.arbitrary_total * self.scale)
            ),
            seed=seed, repetitions=repetitions, warmup=warmup,
        )
