"""
File formats: segment CSV input, xyz and VOX3 voxel output, benchmark reports.

VOX3 layout (all little-endian):
    magic   4 bytes  b"VOX3"
    version u32      1 = single chain, 2 = batch
    count   u64      number of voxel records
    v2 only: u64 segment count, then one u64 voxel count per segment
    records count x (i32 x, i32 y, i32 z)
"""

import csv
import json
import math
import struct
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from line_voxelizer.errors import SegmentFileError, VoxelFormatError
from line_voxelizer.models import BenchRecord, Segment, VoxelChain

PathLike = Union[str, Path]

VOX3_MAGIC = b"VOX3"
VOX3_SINGLE = 1
VOX3_BATCH = 2

_HEADER = struct.Struct("<4sIQ")
_U64 = struct.Struct("<Q")
_RECORD_DTYPE = np.dtype("<i4")

REPORT_COLUMNS = [
    "scenario",
    "parameter",
    "method",
    "workers",
    "group_size",
    "median_ms",
    "total_voxels",
    "mvps",
]


# Segment CSV

def parse_segment_line(line: str, line_number: Optional[int] = None) -> Optional[Segment]:
    """
    Parse one CSV record `sx,sy,sz,ex,ey,ez`.

    Returns:
        The segment, or None for blank and `#` comment lines

    Raises:
        SegmentFileError: wrong field count or a non-finite / non-numeric field
    """
    text = line.strip()
    if not text or text.startswith("#"):
        return None

    fields = [f.strip() for f in text.split(",")]
    if len(fields) != 6:
        raise SegmentFileError(f"expected 6 fields, got {len(fields)}", line_number)

    try:
        coords = [float(f) for f in fields]
    except ValueError as e:
        raise SegmentFileError(f"not a number: {e}", line_number) from e

    if not all(math.isfinite(c) for c in coords):
        raise SegmentFileError("coordinates must be finite", line_number)

    return Segment.from_coords(*coords)


def read_segments(path: PathLike) -> list[Segment]:
    """
    Read every segment record of a CSV file, in file order.

    Raises:
        SegmentFileError: a record is malformed or not valid UTF-8
    """
    segments = []
    with open(path, "rb") as f:
        for number, raw in enumerate(f, 1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise SegmentFileError(f"invalid UTF-8: {e.reason}", number) from e
            seg = parse_segment_line(line, number)
            if seg is not None:
                segments.append(seg)
    return segments


def write_segments(segments: Sequence[Segment], path: PathLike, comment: Optional[str] = None):
    """Write segments as CSV; repr() keeps every coordinate bit-exact"""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if comment:
            f.write(f"# {comment}\n")
        for seg in segments:
            f.write(",".join(repr(float(c)) for c in (*seg.start, *seg.end)) + "\n")


# xyz text

def _xyz_lines(chain: VoxelChain) -> str:
    return "".join(f"{x} {y} {z}\n" for x, y, z in chain.voxels.tolist())


def write_xyz(chains: Sequence[VoxelChain], path: PathLike, separators: bool = False):
    """
    Write chains as `x y z` lines.

    Args:
        chains: Chains in output order
        path: Destination file
        separators: Precede each chain with a `# segment i` line (batch output)
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for index, chain in enumerate(chains):
            if separators:
                f.write(f"# segment {index}\n")
            f.write(_xyz_lines(chain))


def read_xyz(path: PathLike) -> list[np.ndarray]:
    """
    Read an xyz file back into voxel arrays.

    A file without `# segment` separators yields a single array.

    Raises:
        VoxelFormatError: a line is not three integers
    """
    groups: list[list[list[int]]] = []
    current: Optional[list[list[int]]] = None

    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, 1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                current = []
                groups.append(current)
                continue
            parts = text.split()
            if len(parts) != 3:
                raise VoxelFormatError(f"line {number}: expected 3 integers, got {len(parts)}")
            try:
                voxel = [int(p) for p in parts]
            except ValueError as e:
                raise VoxelFormatError(f"line {number}: {e}") from e
            if current is None:
                current = []
                groups.append(current)
            current.append(voxel)

    return [np.array(g, dtype=np.int32).reshape(-1, 3) for g in groups]


# VOX3 binary

def _records(voxels: np.ndarray) -> bytes:
    return np.ascontiguousarray(voxels, dtype=_RECORD_DTYPE).reshape(-1, 3).tobytes()


def write_vox3(chains: Sequence[VoxelChain], path: PathLike, batch: Optional[bool] = None):
    """
    Write chains in VOX3 format.

    Args:
        chains: Chains in output order
        path: Destination file
        batch: Force the version 2 layout (default: only for more than one chain)
    """
    if batch is None:
        batch = len(chains) != 1
    if not batch and len(chains) != 1:
        raise VoxelFormatError("the version 1 layout holds exactly one chain")

    counts = [len(c) for c in chains]
    with open(path, "wb") as f:
        f.write(_HEADER.pack(VOX3_MAGIC, VOX3_BATCH if batch else VOX3_SINGLE, sum(counts)))
        if batch:
            f.write(_U64.pack(len(chains)))
            f.write(np.array(counts, dtype="<u8").tobytes())
        for chain in chains:
            f.write(_records(chain.voxels))


def _take(data: bytes, offset: int, size: int, what: str) -> bytes:
    if offset + size > len(data):
        raise VoxelFormatError(f"truncated file: {what} needs {size} bytes at offset {offset}")
    return data[offset:offset + size]


def read_vox3(path: PathLike) -> list[np.ndarray]:
    """
    Read a VOX3 file into one (n, 3) int32 array per chain.

    Raises:
        VoxelFormatError: bad magic, unknown version, truncated or oversized payload
    """
    data = Path(path).read_bytes()
    magic, version, count = _HEADER.unpack(_take(data, 0, _HEADER.size, "header"))
    if magic != VOX3_MAGIC:
        raise VoxelFormatError(f"bad magic {magic!r}")
    offset = _HEADER.size

    if version == VOX3_SINGLE:
        counts = [count]
    elif version == VOX3_BATCH:
        (segment_count,) = _U64.unpack(_take(data, offset, _U64.size, "segment count"))
        offset += _U64.size
        table = _take(data, offset, 8 * segment_count, "count table")
        counts = np.frombuffer(table, dtype="<u8").tolist()
        offset += len(table)
        if sum(counts) != count:
            raise VoxelFormatError(f"count table sums to {sum(counts)}, header says {count}")
    else:
        raise VoxelFormatError(f"unsupported version {version}")

    payload = _take(data, offset, 12 * count, "voxel records")
    if offset + len(payload) != len(data):
        raise VoxelFormatError(f"{len(data) - offset - len(payload)} trailing bytes")

    voxels = np.frombuffer(payload, dtype=_RECORD_DTYPE).reshape(-1, 3).astype(np.int32)
    bounds = np.cumsum(counts)[:-1]
    return np.split(voxels, bounds) if len(counts) > 1 else [voxels]


def write_chains(chains: Sequence[VoxelChain], path: PathLike, fmt: str, batch: bool = False):
    """Dispatch to write_xyz or write_vox3 by format name"""
    if fmt == "vox3":
        write_vox3(chains, path, batch=batch)
    else:
        write_xyz(chains, path, separators=batch)


# Benchmark reports

def write_report_csv(records: Sequence[BenchRecord], path: PathLike):
    """Write records with the fixed report header"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for record in records:
            row = record.model_dump(mode="json", include=set(REPORT_COLUMNS))
            row["median_ms"] = f"{record.median_ms:.6f}"
            row["mvps"] = f"{record.mvps:.6f}"
            writer.writerow(row)


def write_report_json(records: Sequence[BenchRecord], path: PathLike, metadata: Optional[dict] = None):
    """Write records plus run metadata as one JSON document"""
    document = {
        "metadata": metadata or {},
        "records": [r.model_dump(mode="json") for r in records],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)
        f.write("\n")
