"""
Exception hierarchy for the voxelizer
"""

from typing import Optional


class VoxelizerError(Exception):
    """Base class for every error raised by line_voxelizer"""


class CoordinateRangeError(VoxelizerError, ValueError):
    """A point cannot be mapped onto the signed 32-bit voxel lattice"""


class DegenerateSegmentError(VoxelizerError, ValueError):
    """A zero-length segment was used where a direction is required"""


class NoCandidatesError(VoxelizerError, ValueError):
    """The walk asked for candidates while already sitting on the end voxel"""


class WalkDivergedError(VoxelizerError, RuntimeError):
    """The candidate walk exceeded its step guard (implementation bug)"""


class ChainMismatchError(VoxelizerError, ValueError):
    """Two chains that should describe the same segment do not"""


class EmptyBatchError(VoxelizerError, ValueError):
    """A batch was requested for zero segments"""


class WorkItemRangeError(VoxelizerError, IndexError):
    """A (segment, k) work item lies outside the batch grid"""


class CapacityOverflowError(VoxelizerError, RuntimeError):
    """The batch output buffer was too small for the live work items"""


class InfeasibleTargetError(VoxelizerError, ValueError):
    """A workload target cannot be met with the requested segment count"""


class InvalidMeasurementError(VoxelizerError, ValueError):
    """A timing measurement is non-positive"""


class VoxelFormatError(VoxelizerError, ValueError):
    """A voxel file is malformed"""


class SegmentFileError(VoxelizerError, ValueError):
    """A segment CSV record is malformed"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
