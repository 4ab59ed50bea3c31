"""File formats: far-field and sweep CSV, binary field snapshots.

Snapshot layout (little-endian)::

    offset  size  field
    0       8     magic b"CSFIELD\\0"
    8       4     uint32 format version (1)
    12      4     uint32 nx
    16      4     uint32 ny
    20      32    float64 x_min, x_max, y_min, y_max
    52      8     float64 k
    60      16*nx*ny  complex128 values, row-major [iy, ix]
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .farfield import FarFieldPattern
from .sweep import SweepTable

__all__ = ["MAGIC", "SNAPSHOT_VERSION", "Snapshot", "write_snapshot", "read_snapshot",
           "write_far_field_csv", "read_far_field_csv", "write_sweep_csv"]

MAGIC = b"CSFIELD\0"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<8sIII4dd")


@dataclass(frozen=True)
class Snapshot:
    values: np.ndarray
    bbox: tuple
    k: float


def write_snapshot(path, values, bbox, k: float) -> None:
    v = np.ascontiguousarray(values, dtype="<c16")
    ny, nx = v.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, SNAPSHOT_VERSION, nx, ny, *map(float, bbox), float(k)))
        fh.write(v.tobytes())


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise DomainError("truncated snapshot header")
        magic, version, nx, ny, x0, x1, y0, y1, k = _HEADER.unpack(head)
        if magic != MAGIC or version != SNAPSHOT_VERSION:
            raise DomainError("not a field snapshot (bad magic or version)")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != nx * ny:
        raise DomainError("snapshot payload size does not match its header")
    return Snapshot(data.reshape(ny, nx).astype(complex), (x0, x1, y0, y1), k)


def write_far_field_csv(path, pattern: FarFieldPattern) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["angle", "re", "im"])
        for a, v in zip(pattern.angles, pattern.values):
            w.writerow([repr(float(a)), repr(float(v.real)), repr(float(v.imag))])


def read_far_field_csv(path, k: float) -> FarFieldPattern:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return FarFieldPattern.from_values(k, rows[:, 1] + 1j * rows[:, 2])


def write_sweep_csv(path, tables: dict) -> None:
    """One row per wavenumber; ``norm``/``floor``/``flag`` columns per named table."""
    names = list(tables)
    ks = tables[names[0]].ks
    for name in names[1:]:
        if not np.array_equal(tables[name].ks, ks):
            raise DomainError("sweep tables use different wavenumber grids")
    header = ["k"]
    for name in names:
        header += [f"norm_{name}", f"min_{name}", f"max_{name}", f"residual_{name}",
                   f"floor_{name}", f"flag_{name}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, k in enumerate(ks):
            row = [repr(float(k))]
            for name in names:
                e = tables[name].entries[i]
                flag = "failed" if e.failed else int(e.flagged)
                row += [repr(e.norm), repr(e.abs_min), repr(e.abs_max), repr(e.residual),
                        repr(e.floor), flag]
            w.writerow(row)
