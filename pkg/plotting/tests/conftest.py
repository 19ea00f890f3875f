"""Solver artifacts for the plotting tests, created through the solver CLI.

This package only ever reads files, so the fixtures produce them the way a
user would: by running the installed `trsw` executable. Nothing here
imports the solver.
"""
from __future__ import annotations

import shutil
import subprocess

import numpy as np
import pytest

from trswplot import KIND_PLANE, Snapshot, gll_nodes

REST_YAML = """\
testcase: {name: rest}
mesh: {kind: cubed_sphere, n: 2, p: 3}
time: {duration_seconds: 0.0}
output:
  diagnostics_every: 1
  snapshot_every: 1
  snapshot_fields: [h, b, vorticity, coriolis]
"""

JET_YAML = """\
testcase: {name: galewsky, perturbation_form: classic_squared}
mesh: {kind: cubed_sphere, n: 4, p: 3}
time: {duration_seconds: 0.0}
output: {snapshot_every: 1, snapshot_fields: [h, b, vorticity, coriolis]}
"""

DRIFT_YAML = """\
testcase: {name: galewsky, perturbation_form: classic_squared}
mesh: {kind: cubed_sphere, n: 2, p: 3}
scheme: {flux: dissipative}
time: {duration_seconds: 3600.0, cfl: 0.25}
output: {diagnostics_every: 1, snapshot_every: 1000, snapshot_fields: [h, b]}
"""

PLANE_YAML = """\
testcase:
  name: plane_blob
  depth: 100.0
  b0: 10.0
  blob_amp: 0.5
  blob_width: 1.5e5
mesh: {kind: periodic_plane, nx: 4, ny: 5, p: 3, lx: 1.0e6, ly: 1.0e6}
planet: {omega: 0.0, f_plane: 1.0e-4}
time: {duration_seconds: 0.0}
output: {snapshot_every: 1, snapshot_fields: [h, b, vorticity]}
"""


def _solve(cfg_text: str, base, name: str):
    if shutil.which("trsw") is None:
        pytest.fail("the solver CLI 'trsw' is not on PATH; install it first")
    cfg = base / f"{name}.yaml"
    cfg.write_text(cfg_text)
    out = base / name
    proc = subprocess.run(["trsw", "run", str(cfg), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, f"solver run failed:\n{proc.stderr}"
    return out


@pytest.fixture(scope="session")
def rest_run(tmp_path_factory):
    """Resting sphere, step 0 only: constant h, vorticity equals f."""
    return _solve(REST_YAML, tmp_path_factory.mktemp("rest"), "rest")


@pytest.fixture(scope="session")
def jet_run(tmp_path_factory):
    """Zonal jet initial state on a coarse sphere, step 0 only."""
    return _solve(JET_YAML, tmp_path_factory.mktemp("jet"), "jet")


@pytest.fixture(scope="session")
def drift_run(tmp_path_factory):
    """One simulated hour: per-step diagnostics rows, evolved final snapshot."""
    return _solve(DRIFT_YAML, tmp_path_factory.mktemp("drift"), "drift")


@pytest.fixture(scope="session")
def plane_run(tmp_path_factory):
    """Buoyancy blob on the periodic plane, step 0 only."""
    return _solve(PLANE_YAML, tmp_path_factory.mktemp("plane"), "plane")


def first_snapshot(run_dir):
    files = sorted(run_dir.glob("snapshot_*.dat"))
    assert files, f"no snapshots in {run_dir}"
    return files[0]


def synthetic_plane_snapshot(nx=4, ny=4, p=3, lx=1.0, ly=1.0,
                             x_on_axis1=True, reverse_x=False) -> Snapshot:
    """Hand-built plane snapshot with a chosen element and axis layout.

    The writer's conventions are deliberately varied here (which array axis
    carries x, and in which direction) to prove the locator infers them
    from the coordinate fields rather than assuming them.
    """
    m = p + 1
    frac = (gll_nodes(p) + 1.0) / 2.0
    fx = frac[::-1] if reverse_x else frac
    dx, dy = lx / nx, ly / ny
    nelem = nx * ny
    x = np.empty((nelem, m, m))
    y = np.empty((nelem, m, m))
    for iy in range(ny):
        for ix in range(nx):
            e = iy * nx + ix
            if x_on_axis1:
                x[e] = ((ix + fx) * dx)[None, :]
                y[e] = ((iy + frac) * dy)[:, None]
            else:
                x[e] = ((ix + fx) * dx)[:, None]
                y[e] = ((iy + frac) * dy)[None, :]
    # smooth and exactly periodic, so co-located edge nodes agree bitwise
    f = 2.0 + np.sin(2 * np.pi * x / lx) * np.cos(2 * np.pi * y / ly)
    return Snapshot(kind=KIND_PLANE, nx=nx, ny=ny, p=p, step=0, t=0.0,
                    param0=lx, param1=ly,
                    fields={"x": x, "y": y, "f": f})
