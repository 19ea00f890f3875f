"""Run artifacts: fixed-column diagnostics CSV and binary field snapshots.

Snapshot layout (all little-endian):
  bytes 0..63   header: magic "TRSWSNAP", u32 version, u32 kind (0 sphere,
                1 plane), u32 nx, u32 ny, u32 p, u32 nfields, u64 step,
                f64 t_seconds, f64 param0, f64 param1
  then nfields blocks of [32-byte zero-padded ascii name,
                nelem*(p+1)^2 f64 values, element-major node-row-major]
nelem is 6*nx*ny for the sphere (panel-major element order) and nx*ny for
the plane. param0/param1 carry (radius, 0) or (lx, ly). The format is the
contract with the plotting package, which parses it independently.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidStateError

DIAG_COLUMNS = ("step", "t_seconds", "M", "S", "E", "Z", "W",
                "relM", "relS", "relE", "relZ", "relW", "dt")

SNAPSHOT_MAGIC = b"TRSWSNAP"
SNAPSHOT_VERSION = 1
HEADER_STRUCT = struct.Struct("<8sIIIIIIQddd")   # 64 bytes
NAME_BYTES = 32
KIND_CODES = {"cubed_sphere": 0, "periodic_plane": 1}
KIND_NAMES = {code: kind for kind, code in KIND_CODES.items()}

assert HEADER_STRUCT.size == 64


class DiagnosticsWriter:
    """Streams diagnostics rows; flushed per row so aborts keep the tail."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="", encoding="ascii")
        self._csv = csv.writer(self._fh)
        self._csv.writerow(DIAG_COLUMNS)
        self._fh.flush()

    def write(self, step: int, t: float, record, drifts: dict, dt: float) -> None:
        vals = (t, record.M, record.S, record.E, record.Z, record.W,
                drifts["relM"], drifts["relS"], drifts["relE"],
                drifts["relZ"], drifts["relW"], dt)
        # repr(float) is the shortest round-tripping decimal form
        self._csv.writerow([step] + [repr(float(v)) for v in vals])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_diagnostics(path) -> dict:
    """Columns of diagnostics.csv as float arrays keyed by name."""
    with open(path, "r", newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != DIAG_COLUMNS:
        raise InvalidStateError(f"{path} is not a diagnostics file")
    cols = np.array([[float(v) for v in row] for row in rows[1:]]).T
    if cols.size == 0:
        cols = np.zeros((len(DIAG_COLUMNS), 0))
    return {name: cols[i] for i, name in enumerate(DIAG_COLUMNS)}


def snapshot_path(directory, step: int) -> Path:
    return Path(directory) / f"snapshot_{step:08d}.dat"


def write_snapshot(path, *, kind: str, nx: int, ny: int, p: int, step: int,
                   t: float, param0: float, param1: float,
                   fields: dict) -> None:
    """Fields must be float64 arrays of identical (nelem, p+1, p+1) shape."""
    header = HEADER_STRUCT.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
                                KIND_CODES[kind], nx, ny, p, len(fields),
                                step, float(t), float(param0), float(param1))
    nelem = (6 * nx * ny) if kind == "cubed_sphere" else nx * ny
    nodes = nelem * (p + 1) ** 2
    with open(path, "wb") as fh:
        fh.write(header)
        for name, arr in fields.items():
            blob = np.ascontiguousarray(arr, dtype="<f8")
            if blob.size != nodes:
                raise InvalidStateError(
                    f"field '{name}' has {blob.size} values, mesh has {nodes} nodes")
            fh.write(name.encode("ascii").ljust(NAME_BYTES, b"\0"))
            fh.write(blob.tobytes())


@dataclass(frozen=True)
class Snapshot:
    kind: str
    nx: int
    ny: int
    p: int
    step: int
    t: float
    param0: float
    param1: float
    fields: dict

    @property
    def nelem(self) -> int:
        base = self.nx * self.ny
        return 6 * base if self.kind == "cubed_sphere" else base

    @property
    def nodes_per_element(self) -> int:
        return (self.p + 1) ** 2


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as fh:
        raw = fh.read(HEADER_STRUCT.size)
        if len(raw) != HEADER_STRUCT.size:
            raise InvalidStateError(f"{path}: truncated snapshot header")
        (magic, version, kind_code, nx, ny, p, nfields,
         step, t, param0, param1) = HEADER_STRUCT.unpack(raw)
        if magic != SNAPSHOT_MAGIC:
            raise InvalidStateError(f"{path}: bad magic {magic!r}")
        if version != SNAPSHOT_VERSION:
            raise InvalidStateError(f"{path}: unsupported version {version}")
        if kind_code not in KIND_NAMES:
            raise InvalidStateError(f"{path}: unknown mesh kind code {kind_code}")
        kind = KIND_NAMES[kind_code]
        nelem = (6 * nx * ny) if kind == "cubed_sphere" else nx * ny
        nodes = nelem * (p + 1) ** 2
        fields = {}
        for _ in range(nfields):
            name = fh.read(NAME_BYTES).rstrip(b"\0").decode("ascii")
            data = np.frombuffer(fh.read(8 * nodes), dtype="<f8")
            if data.size != nodes:
                raise InvalidStateError(f"{path}: truncated block '{name}'")
            fields[name] = data.reshape(nelem, p + 1, p + 1)
    return Snapshot(kind=kind, nx=nx, ny=ny, p=p, step=step, t=t,
                    param0=param0, param1=param1, fields=fields)
