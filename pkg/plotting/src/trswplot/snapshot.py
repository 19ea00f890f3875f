"""Reader and writer for the solver's binary snapshot files.

Implemented from the byte layout alone so this package never imports the
solver: a 64 byte little-endian header, then one 32 byte zero-padded ascii
name plus one float64 block of nelem*(p+1)^2 nodal values per field.
Blocks are element-major, node rows then columns within an element.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"TRSWSNAP"
VERSION = 1
KIND_SPHERE = 0
KIND_PLANE = 1

_HEADER = struct.Struct("<8sIIIIIIQddd")
_NAME_BYTES = 32


class SnapshotError(ValueError):
    """Malformed snapshot file or inconsistent snapshot contents."""


@dataclass
class Snapshot:
    kind: int
    nx: int                 # sphere: elements per cube edge (ny equal)
    ny: int
    p: int                  # polynomial degree, p+1 nodes per edge
    step: int
    t: float                # seconds
    param0: float           # sphere: radius; plane: lx
    param1: float           # sphere: unused;  plane: ly
    fields: dict = field(default_factory=dict)   # name -> (nelem, p+1, p+1)

    @property
    def nelem(self) -> int:
        mult = 6 if self.kind == KIND_SPHERE else 1
        return mult * self.nx * self.ny

    @property
    def radius(self) -> float:
        if self.kind != KIND_SPHERE:
            raise SnapshotError("radius is only defined for sphere snapshots")
        return self.param0

    @property
    def extents(self) -> tuple:
        if self.kind != KIND_PLANE:
            raise SnapshotError("extents are only defined for plane snapshots")
        return self.param0, self.param1


def read_snapshot(path) -> Snapshot:
    """Parse one snapshot file; strict about sizes, names and the magic."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise SnapshotError(f"file shorter than the {_HEADER.size} byte header")
    (magic, version, kind, nx, ny, p, nfields,
     step, t, par0, par1) = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    if kind not in (KIND_SPHERE, KIND_PLANE):
        raise SnapshotError(f"unknown mesh kind code {kind}")
    if nx < 1 or ny < 1 or p < 1:
        raise SnapshotError(f"bad mesh header nx={nx} ny={ny} p={p}")

    snap = Snapshot(kind=kind, nx=nx, ny=ny, p=p, step=step, t=t,
                    param0=par0, param1=par1)
    m = p + 1
    block = snap.nelem * m * m * 8
    expect = _HEADER.size + nfields * (_NAME_BYTES + block)
    if len(raw) != expect:
        raise SnapshotError(
            f"file is {len(raw)} bytes, layout requires {expect} "
            f"for {nfields} fields of {snap.nelem}x{m}x{m} values")

    off = _HEADER.size
    for _ in range(nfields):
        name_raw = raw[off:off + _NAME_BYTES]
        off += _NAME_BYTES
        try:
            name = name_raw.rstrip(b"\x00").decode("ascii")
        except UnicodeDecodeError:
            raise SnapshotError(f"field name {name_raw!r} is not ascii") from None
        if not name:
            raise SnapshotError("empty field name")
        if name in snap.fields:
            raise SnapshotError(f"duplicate field name {name!r}")
        data = np.frombuffer(raw, dtype="<f8", count=snap.nelem * m * m,
                             offset=off)
        off += block
        snap.fields[name] = data.reshape(snap.nelem, m, m).copy()
    return snap


def write_snapshot(path, snap: Snapshot) -> None:
    """Serialize with the exact layout read_snapshot parses."""
    m = snap.p + 1
    parts = [_HEADER.pack(MAGIC, VERSION, snap.kind, snap.nx, snap.ny,
                          snap.p, len(snap.fields), snap.step, snap.t,
                          snap.param0, snap.param1)]
    for name, data in snap.fields.items():
        enc = name.encode("ascii")
        if not 0 < len(enc) <= _NAME_BYTES:
            raise SnapshotError(f"field name {name!r} must be 1..{_NAME_BYTES} ascii bytes")
        arr = np.ascontiguousarray(data, dtype="<f8")
        if arr.shape != (snap.nelem, m, m):
            raise SnapshotError(
                f"field {name!r} has shape {arr.shape}, "
                f"expected {(snap.nelem, m, m)}")
        parts.append(enc.ljust(_NAME_BYTES, b"\x00"))
        parts.append(arr.tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))
