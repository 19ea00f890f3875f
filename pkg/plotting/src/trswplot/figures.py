"""Figure builders: field rasters, drift curves, convergence tables."""
from __future__ import annotations

import csv

import numpy as np
import matplotlib.pyplot as plt

from .raster import ElementLocator, raster_latlon, raster_ortho, raster_plane
from .snapshot import KIND_PLANE, Snapshot, SnapshotError

CMAP = "viridis"                          # one fixed colormap for all rasters
DRIFT_SERIES = ("relM", "relS", "relE", "relZ")
DRIFT_FLOOR = 1e-17                       # log scale cannot show exact zeros
PROJECTIONS = ("latlon", "north", "south")


def plot_field(snap: Snapshot, field: str = "h", projection: str = "latlon",
               samples: int = 4):
    """Raster one snapshot field; prints the nodal min/max, returns the figure."""
    if field not in snap.fields:
        known = ", ".join(sorted(snap.fields))
        raise SnapshotError(f"no field {field!r} in snapshot (has: {known})")
    data = snap.fields[field]
    print(f"{field}: min={data.min():.10g} max={data.max():.10g}")

    loc = ElementLocator(snap)
    aspect = "auto"
    if snap.kind == KIND_PLANE:
        vals, extent = raster_plane(snap, field, samples, locator=loc)
        xlabel, ylabel = "x (m)", "y (m)"
    elif projection == "latlon":
        vals, extent = raster_latlon(snap, field, samples, locator=loc)
        xlabel, ylabel = "longitude (deg)", "latitude (deg)"
    elif projection in ("north", "south"):
        vals, extent = raster_ortho(snap, field, projection, samples, locator=loc)
        xlabel, ylabel = "", ""
        aspect = "equal"
    else:
        raise ValueError(f"projection must be one of {PROJECTIONS}, got {projection!r}")

    fig, ax = plt.subplots(figsize=(9.0, 4.8))
    im = ax.imshow(vals, origin="lower", extent=extent, cmap=CMAP, aspect=aspect)
    fig.colorbar(im, ax=ax, label=field)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"{field}, t = {snap.t:.6g} s (step {snap.step})")
    return fig


def read_diagnostics(path) -> dict:
    """diagnostics.csv -> column name -> float array."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path} has no data rows")
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def plot_diagnostics(path):
    """Log-scale relative drift curves for mass, buoyancy, energy, entropy."""
    cols = read_diagnostics(path)
    missing = [k for k in DRIFT_SERIES + ("t_seconds",) if k not in cols]
    if missing:
        raise ValueError(f"{path} lacks columns: {', '.join(missing)}")
    t = cols["t_seconds"] / 86400.0
    fig, ax = plt.subplots(figsize=(7.2, 4.8))
    for name in DRIFT_SERIES:
        ax.semilogy(t, np.maximum(np.abs(cols[name]), DRIFT_FLOOR),
                    marker=".", label=name)
    ax.set_xlabel("t (days)")
    ax.set_ylabel(f"|relative drift| (zeros shown at {DRIFT_FLOOR:g})")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def read_convergence(path) -> dict:
    """Convergence table -> mode -> (dx, err_h) arrays, sorted by dx.

    Expects the solver's table: header mode,n,dx,err_h,... with optional
    trailing slope_* rows, which are ignored (slopes are refitted here).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path} is empty")
        try:
            cmode = header.index("mode")
            cdx = header.index("dx")
            cerr = header.index("err_h")
        except ValueError:
            raise ValueError(
                f"{path} needs columns mode, dx, err_h; got {header}") from None
        series: dict = {}
        for row in reader:
            if not row or row[cmode].startswith("slope"):
                continue
            series.setdefault(row[cmode], []).append(
                (float(row[cdx]), float(row[cerr])))
    out = {}
    for mode, pts in series.items():
        pts.sort()
        arr = np.array(pts)
        out[mode] = (arr[:, 0], arr[:, 1])
    return out


def plot_convergence(path):
    """Log-log error vs resolution, one line per mode, fitted slope in legend."""
    series = read_convergence(path)
    if not series:
        raise ValueError(f"{path} has no data rows")
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for mode, (dx, err) in series.items():
        if dx.size < 2:
            raise ValueError(f"mode {mode!r} has fewer than two resolutions")
        slope = np.polyfit(np.log(dx), np.log(err), 1)[0]
        ax.loglog(dx, err, "o-", label=f"{mode}: fitted order {slope:.2f}")
    ax.set_xlabel("average nodal spacing (m)")
    ax.set_ylabel("L2 error of h")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig
