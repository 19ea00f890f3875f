"""Point sampling of snapshot fields through the analytic mesh mapping.

A query point is charted analytically: on the sphere its dominant
Cartesian component selects a cube panel and the two equiangular panel
angles select the element tile (the mesh is uniform in angle); on the
plane the periodic coordinates select the tile directly. Nodal values are
then evaluated with the tensor-product Lagrange basis. Which array axis of
a stored node block runs along which chart direction is inferred from the
coordinate fields every snapshot carries, so nothing about the writer's
element numbering or node ordering is assumed.
"""
from __future__ import annotations

import numpy as np

from .interp import gll_nodes, lagrange_rows
from .snapshot import KIND_PLANE, KIND_SPHERE, Snapshot, SnapshotError


def panel_angles(xyz) -> tuple:
    """(panel id, angle1, angle2) of Cartesian directions.

    Panels are keyed by the dominant component: 2*axis for the positive
    face, 2*axis+1 for the negative one. Angles are the equiangular chart
    coordinates arctan of the two cyclically following components over the
    dominant one, each in [-pi/4, pi/4]. Radius drops out of the ratios.
    """
    v = np.asarray(xyz, dtype=float)
    ax = np.abs(v).argmax(axis=-1)
    w = np.take_along_axis(v, ax[..., None], -1)[..., 0]
    u = np.take_along_axis(v, ((ax + 1) % 3)[..., None], -1)[..., 0]
    s = np.take_along_axis(v, ((ax + 2) % 3)[..., None], -1)[..., 0]
    return 2 * ax + (w < 0), np.arctan(u / w), np.arctan(s / w)


def direction(panel, a1, a2) -> np.ndarray:
    """Unit vectors from panel charts; inverse of panel_angles."""
    panel = np.asarray(panel)
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    shape = np.broadcast(panel, a1, a2).shape
    ax = np.broadcast_to(panel // 2, shape)
    w = np.where(np.broadcast_to(panel % 2, shape) == 0, 1.0, -1.0)
    out = np.zeros(shape + (3,))
    np.put_along_axis(out, ax[..., None], w[..., None], -1)
    np.put_along_axis(out, ((ax + 1) % 3)[..., None],
                      (w * np.tan(a1))[..., None], -1)
    np.put_along_axis(out, ((ax + 2) % 3)[..., None],
                      (w * np.tan(a2))[..., None], -1)
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


class ElementLocator:
    """Maps query points of one snapshot to (element, reference coords)."""

    def __init__(self, snap: Snapshot):
        self.kind = snap.kind
        self.nodes = gll_nodes(snap.p)
        if snap.kind == KIND_SPHERE:
            self._init_sphere(snap)
        else:
            self._init_plane(snap)

    def _coords(self, snap: Snapshot, names: tuple) -> np.ndarray:
        try:
            return np.stack([snap.fields[n] for n in names], axis=-1)
        except KeyError as exc:
            raise SnapshotError(
                f"snapshot lacks node coordinate field {exc.args[0]!r}; "
                "point sampling needs " + ", ".join(names)) from None

    def _init_sphere(self, snap: Snapshot) -> None:
        xyz = self._coords(snap, ("x", "y", "z"))
        nelem, m = snap.nelem, snap.p + 1
        n = snap.nx
        self.n1 = self.n2 = n
        self.delta = (0.5 * np.pi) / n
        self.lo = -0.25 * np.pi

        # element means are strictly interior, so their chart is unambiguous
        cpanel, ca1, ca2 = panel_angles(xyz.reshape(nelem, -1, 3).mean(axis=1))
        lookup = np.full((6, n, n), -1, dtype=int)
        lookup[cpanel, self._tile(ca1, n), self._tile(ca2, n)] = np.arange(nelem)
        if (lookup < 0).any():
            raise SnapshotError("node coordinates do not tile the cube panels")
        self.lookup = lookup

        # node angles in the element's own panel chart (a node exactly on a
        # cube edge would chart to the wrong panel under argmax)
        flat = xyz.reshape(nelem, m * m, 3)
        axis = cpanel // 2
        rows = np.arange(nelem)[:, None]
        cols = np.arange(m * m)[None, :]
        w = flat[rows, cols, axis[:, None]]
        u = flat[rows, cols, ((axis + 1) % 3)[:, None]]
        v = flat[rows, cols, ((axis + 2) % 3)[:, None]]
        self._orient(np.arctan(u / w).reshape(nelem, m, m),
                     np.arctan(v / w).reshape(nelem, m, m))

    def _init_plane(self, snap: Snapshot) -> None:
        xy = self._coords(snap, ("x", "y"))
        self.n1, self.n2 = snap.nx, snap.ny
        lx, ly = snap.extents
        if lx <= 0 or ly <= 0:
            raise SnapshotError(f"bad plane extents {lx} x {ly}")
        self.period = (lx, ly)
        self.dx = (lx / snap.nx, ly / snap.ny)

        c = xy.reshape(snap.nelem, -1, 2).mean(axis=1)
        i1 = np.clip((c[:, 0] // self.dx[0]).astype(int), 0, snap.nx - 1)
        i2 = np.clip((c[:, 1] // self.dx[1]).astype(int), 0, snap.ny - 1)
        lookup = np.full((snap.nx, snap.ny), -1, dtype=int)
        lookup[i1, i2] = np.arange(snap.nelem)
        if (lookup < 0).any():
            raise SnapshotError("node coordinates do not tile the plane")
        self.lookup = lookup
        self._orient(xy[..., 0], xy[..., 1])

    def _tile(self, a, n: int) -> np.ndarray:
        return np.clip(np.floor((a - self.lo) / self.delta).astype(int),
                       0, n - 1)

    def _orient(self, c1: np.ndarray, c2: np.ndarray) -> None:
        """Per element: which array axis carries chart coord 1, and signs."""
        d1_ax0 = c1[:, -1, 0] - c1[:, 0, 0]
        d1_ax1 = c1[:, 0, -1] - c1[:, 0, 0]
        self.swap = np.abs(d1_ax1) > np.abs(d1_ax0)
        d_ax0 = np.where(self.swap, c2[:, -1, 0] - c2[:, 0, 0], d1_ax0)
        d_ax1 = np.where(self.swap, d1_ax1, c2[:, 0, -1] - c2[:, 0, 0])
        if (np.abs(d_ax0) < 1e-12).any() or (np.abs(d_ax1) < 1e-12).any():
            raise SnapshotError("degenerate node coordinates in some element")
        self.neg0 = d_ax0 < 0
        self.neg1 = d_ax1 < 0

    def locate(self, pts: np.ndarray) -> tuple:
        """(element, ref coord along array axis 0, along axis 1) per point."""
        pts = np.asarray(pts, dtype=float)
        if self.kind == KIND_SPHERE:
            panel, a1, a2 = panel_angles(pts)
            i1 = self._tile(a1, self.n1)
            i2 = self._tile(a2, self.n2)
            e = self.lookup[panel, i1, i2]
            f1 = (a1 - (self.lo + i1 * self.delta)) / self.delta
            f2 = (a2 - (self.lo + i2 * self.delta)) / self.delta
        else:
            xm = np.mod(pts[..., 0], self.period[0])
            ym = np.mod(pts[..., 1], self.period[1])
            i1 = np.clip(np.floor(xm / self.dx[0]).astype(int), 0, self.n1 - 1)
            i2 = np.clip(np.floor(ym / self.dx[1]).astype(int), 0, self.n2 - 1)
            e = self.lookup[i1, i2]
            f1 = xm / self.dx[0] - i1
            f2 = ym / self.dx[1] - i2
        r1 = np.clip(2.0 * f1 - 1.0, -1.0, 1.0)
        r2 = np.clip(2.0 * f2 - 1.0, -1.0, 1.0)
        # chart refs -> array-axis refs; GLL nodes are symmetric so a
        # reversed axis is exactly a sign flip
        s = self.swap[e]
        q0 = np.where(s, r2, r1) * np.where(self.neg0[e], -1.0, 1.0)
        q1 = np.where(s, r1, r2) * np.where(self.neg1[e], -1.0, 1.0)
        return e, q0, q1

    def evaluate(self, data: np.ndarray, pts: np.ndarray) -> np.ndarray:
        """Sample one nodal field (nelem, p+1, p+1) at points (..., dim)."""
        pts = np.asarray(pts, dtype=float)
        shape = pts.shape[:-1]
        e, q0, q1 = self.locate(pts.reshape(-1, pts.shape[-1]))
        b0 = lagrange_rows(self.nodes, q0)
        b1 = lagrange_rows(self.nodes, q1)
        vals = np.einsum("nij,ni,nj->n", np.asarray(data)[e], b0, b1)
        return vals.reshape(shape)


def latlon_directions(height: int, width: int) -> np.ndarray:
    """Unit vectors of a regular lat-lon grid, poles inclusive."""
    lon = np.linspace(-np.pi, np.pi, width, endpoint=False)
    lat = np.linspace(-0.5 * np.pi, 0.5 * np.pi, height)
    lo, la = np.meshgrid(lon, lat)
    return np.stack([np.cos(la) * np.cos(lo),
                     np.cos(la) * np.sin(lo),
                     np.sin(la)], axis=-1)


def raster_latlon(snap: Snapshot, field: str, samples: int = 4,
                  locator: ElementLocator | None = None) -> tuple:
    """(values (H, W), extent in degrees); default 4 samples per nodal gap."""
    if snap.kind != KIND_SPHERE:
        raise SnapshotError("lat-lon rasters need a sphere snapshot")
    loc = locator if locator is not None else ElementLocator(snap)
    width = 4 * snap.nx * snap.p * samples
    height = 2 * snap.nx * snap.p * samples + 1
    vals = loc.evaluate(snap.fields[field], latlon_directions(height, width))
    return vals, (-180.0, 180.0, -90.0, 90.0)


def raster_ortho(snap: Snapshot, field: str, hemisphere: str = "north",
                 samples: int = 4,
                 locator: ElementLocator | None = None) -> tuple:
    """(masked values (N, N), extent); orthographic view of one hemisphere."""
    if snap.kind != KIND_SPHERE:
        raise SnapshotError("orthographic rasters need a sphere snapshot")
    if hemisphere not in ("north", "south"):
        raise ValueError(f"hemisphere must be north or south, got {hemisphere!r}")
    loc = locator if locator is not None else ElementLocator(snap)
    size = 2 * snap.nx * snap.p * samples + 1
    xs = np.linspace(-1.0, 1.0, size)
    gx, gy = np.meshgrid(xs, xs)
    r2 = gx * gx + gy * gy
    inside = r2 <= 1.0
    gz = np.sqrt(np.clip(1.0 - r2, 0.0, None))
    if hemisphere == "south":
        gz = -gz
    dirs = np.stack([gx[inside], gy[inside], gz[inside]], axis=-1)
    vals = np.full(gx.shape, np.nan)
    vals[inside] = loc.evaluate(snap.fields[field], dirs)
    return np.ma.masked_invalid(vals), (-1.0, 1.0, -1.0, 1.0)


def raster_plane(snap: Snapshot, field: str, samples: int = 4,
                 locator: ElementLocator | None = None) -> tuple:
    """(values (H, W), extent in meters) on cell centers of the periodic box."""
    if snap.kind != KIND_PLANE:
        raise SnapshotError("plane rasters need a plane snapshot")
    loc = locator if locator is not None else ElementLocator(snap)
    lx, ly = snap.extents
    width = snap.nx * snap.p * samples
    height = snap.ny * snap.p * samples
    xs = (np.arange(width) + 0.5) * (lx / width)
    ys = (np.arange(height) + 0.5) * (ly / height)
    gx, gy = np.meshgrid(xs, ys)
    vals = loc.evaluate(snap.fields[field], np.stack([gx, gy], axis=-1))
    return vals, (0.0, lx, 0.0, ly)
