"""Snapshot parser: byte-level round trips and strict rejection."""
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trswplot import (KIND_PLANE, KIND_SPHERE, Snapshot, SnapshotError,
                      read_snapshot, write_snapshot)

from conftest import first_snapshot, synthetic_plane_snapshot


def test_synthetic_roundtrip_bitwise(tmp_path):
    snap = synthetic_plane_snapshot()
    path = tmp_path / "s.dat"
    write_snapshot(path, snap)
    back = read_snapshot(path)
    assert (back.kind, back.nx, back.ny, back.p) == (KIND_PLANE, 4, 4, 3)
    assert (back.step, back.t) == (0, 0.0)
    assert back.extents == (1.0, 1.0)
    assert list(back.fields) == ["x", "y", "f"]
    for name in snap.fields:
        assert np.array_equal(back.fields[name], snap.fields[name])
        assert back.fields[name].dtype == np.float64


def test_real_file_roundtrips_to_identical_bytes(rest_run, tmp_path):
    src = first_snapshot(rest_run)
    snap = read_snapshot(src)
    copy = tmp_path / "copy.dat"
    write_snapshot(copy, snap)
    assert copy.read_bytes() == src.read_bytes()


def test_header_values_of_real_file(rest_run):
    snap = read_snapshot(first_snapshot(rest_run))
    assert snap.kind == KIND_SPHERE
    assert snap.nx == snap.ny == 2
    assert snap.p == 3
    assert snap.nelem == 24
    assert snap.radius == pytest.approx(6.37122e6)
    assert snap.step == 0 and snap.t == 0.0
    for name in ("x", "y", "z", "h", "b", "vorticity", "coriolis"):
        assert snap.fields[name].shape == (24, 4, 4)


def test_rejects_wrong_magic(rest_run, tmp_path):
    raw = first_snapshot(rest_run).read_bytes()
    bad = tmp_path / "bad.dat"
    bad.write_bytes(b"NOTACUBE" + raw[8:])
    with pytest.raises(SnapshotError, match="magic"):
        read_snapshot(bad)


def test_rejects_wrong_version(rest_run, tmp_path):
    raw = bytearray(first_snapshot(rest_run).read_bytes())
    raw[8:12] = struct.pack("<I", 2)
    bad = tmp_path / "bad.dat"
    bad.write_bytes(bytes(raw))
    with pytest.raises(SnapshotError, match="version"):
        read_snapshot(bad)


def test_rejects_truncation_and_garbage(rest_run, tmp_path):
    raw = first_snapshot(rest_run).read_bytes()
    bad = tmp_path / "bad.dat"
    bad.write_bytes(raw[:-7])
    with pytest.raises(SnapshotError, match="bytes"):
        read_snapshot(bad)
    bad.write_bytes(raw + b"\x00" * 3)
    with pytest.raises(SnapshotError, match="bytes"):
        read_snapshot(bad)
    bad.write_bytes(raw[:40])
    with pytest.raises(SnapshotError, match="header"):
        read_snapshot(bad)


def test_rejects_bad_kind_code(rest_run, tmp_path):
    raw = bytearray(first_snapshot(rest_run).read_bytes())
    raw[12:16] = struct.pack("<I", 7)
    bad = tmp_path / "bad.dat"
    bad.write_bytes(bytes(raw))
    with pytest.raises(SnapshotError, match="kind"):
        read_snapshot(bad)


def test_rejects_nonascii_field_name(rest_run, tmp_path):
    raw = bytearray(first_snapshot(rest_run).read_bytes())
    raw[64:68] = b"\xff\xfe\xfd\xfc"
    bad = tmp_path / "bad.dat"
    bad.write_bytes(bytes(raw))
    with pytest.raises(SnapshotError, match="ascii"):
        read_snapshot(bad)


def test_rejects_duplicate_field_names(tmp_path):
    snap = synthetic_plane_snapshot(nx=1, ny=1, p=1)
    path = tmp_path / "s.dat"
    write_snapshot(path, snap)
    raw = bytearray(path.read_bytes())
    # rename field 'y' (second block) to 'x'
    name_off = 64 + 32 + snap.nelem * 4 * 8
    raw[name_off:name_off + 32] = b"x".ljust(32, b"\x00")
    bad = tmp_path / "bad.dat"
    bad.write_bytes(bytes(raw))
    with pytest.raises(SnapshotError, match="duplicate"):
        read_snapshot(bad)


def test_write_rejects_bad_shape_and_names(tmp_path):
    snap = synthetic_plane_snapshot(nx=2, ny=2, p=2)
    path = tmp_path / "s.dat"
    snap.fields["short"] = np.zeros((3, 3, 3))
    with pytest.raises(SnapshotError, match="shape"):
        write_snapshot(path, snap)
    del snap.fields["short"]
    snap.fields["q" * 33] = np.zeros((4, 3, 3))
    with pytest.raises(SnapshotError, match="ascii bytes"):
        write_snapshot(path, snap)


@settings(max_examples=25, deadline=None)
@given(kind=st.sampled_from([KIND_SPHERE, KIND_PLANE]),
       nx=st.integers(1, 3), ny=st.integers(1, 3), p=st.integers(1, 3),
       step=st.integers(0, 2**40), t=st.floats(0, 1e9),
       names=st.lists(st.text(alphabet=st.characters(min_codepoint=48,
                                                     max_codepoint=122),
                              min_size=1, max_size=32).filter(str.isalnum),
                      min_size=1, max_size=4, unique=True),
       seed=st.integers(0, 2**31))
def test_roundtrip_property(tmp_path_factory, kind, nx, ny, p, step, t,
                            names, seed):
    rng = np.random.default_rng(seed)
    mult = 6 if kind == KIND_SPHERE else 1
    shape = (mult * nx * ny, p + 1, p + 1)
    snap = Snapshot(kind=kind, nx=nx, ny=ny, p=p, step=step, t=t,
                    param0=1.5, param1=2.5,
                    fields={n: rng.standard_normal(shape) for n in names})
    path = tmp_path_factory.mktemp("rt") / "s.dat"
    write_snapshot(path, snap)
    back = read_snapshot(path)
    assert (back.kind, back.nx, back.ny, back.p) == (kind, nx, ny, p)
    assert back.step == step and back.t == t
    assert list(back.fields) == list(snap.fields)
    for n in names:
        assert np.array_equal(back.fields[n], snap.fields[n])
