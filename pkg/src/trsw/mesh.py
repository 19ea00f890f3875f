"""Equiangular cubed-sphere and doubly periodic plane meshes.

Geometry is analytic: covariant basis vectors come from closed-form map
derivatives, never from differentiating interpolated coordinates.  Face
normals, tangents and edge scales are computed once on the owner (minus)
side of each face; the plus side uses the negated normal bitwise, which
makes interface telescoping exact.

Element edge/side codes: 0 = west (xi=-1), 1 = east (xi=+1),
2 = south (eta=-1), 3 = north (eta=+1).  Edge nodes are ordered by the
ascending transverse index (j on west/east, i on south/north).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import ReferenceBasis, make_basis

WEST, EAST, SOUTH, NORTH = 0, 1, 2, 3

# Gnomonic panel frames: position direction v(X, Y) = c0 + X c1 + Y c2 with
# orthonormal (c0, c1, c2), so |v| = sqrt(1 + X^2 + Y^2) and g1 x g2 points
# outward on every panel.  Panels: +x, +y, -x, -y, +z, -z.
PANEL_FRAMES = np.array(
    [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 0], [-1, 0, 0], [0, 0, 1]],
        [[-1, 0, 0], [0, -1, 0], [0, 0, 1]],
        [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
        [[0, 0, 1], [0, 1, 0], [-1, 0, 0]],
        [[0, 0, -1], [0, 1, 0], [1, 0, 0]],
    ],
    dtype=float,
)

# Cube seams: (panel_a, side_a, panel_b, side_b, reversed).  Reversed means
# the edge parameter on side b runs opposite to side a, so both the element
# index along the seam and the node order within a face flip.
CUBE_SEAMS = [
    (0, EAST, 1, WEST, False),
    (1, EAST, 2, WEST, False),
    (2, EAST, 3, WEST, False),
    (3, EAST, 0, WEST, False),
    (0, NORTH, 4, SOUTH, False),
    (1, NORTH, 4, EAST, False),
    (2, NORTH, 4, NORTH, True),
    (3, NORTH, 4, WEST, True),
    (0, SOUTH, 5, NORTH, False),
    (1, SOUTH, 5, EAST, True),
    (2, SOUTH, 5, SOUTH, True),
    (3, SOUTH, 5, WEST, False),
]


@dataclass
class FaceSet:
    """Flattened interface tables shared by flux and lift kernels.

    Index arrays address volume nodes flattened as e * N^2 + i * N + j.
    Plus-side indices are already permuted to match the minus-side node
    order, so traces can be compared slot by slot.
    """

    elem_m: np.ndarray   # (nf,)
    side_m: np.ndarray
    elem_p: np.ndarray
    side_p: np.ndarray
    reversed_: np.ndarray  # (nf,) bool
    idx_m: np.ndarray    # (nf, N) flat volume-node indices
    idx_p: np.ndarray
    normal: np.ndarray   # (nf, N, 3) unit outward normal of the minus element
    tangent: np.ndarray  # (nf, N, 3) k x n, so t_plus = -t_minus
    scale: np.ndarray    # (nf, N) edge length scale |g_t|
    lift_m: np.ndarray   # (nf, N) scale / (w_end * J) on each side
    lift_p: np.ndarray
    ncov_m: np.ndarray   # (nf, N, 2) outward normal dotted with (g1, g2)
    ncov_p: np.ndarray   # same for the plus side, with its own basis and -n

    @property
    def count(self) -> int:
        return self.elem_m.size


@dataclass
class Mesh:
    kind: str
    basis: ReferenceBasis
    nelem: int
    x: np.ndarray        # (E, N, N, 3) physical node coordinates
    g1: np.ndarray       # (E, N, N, 3) covariant basis, xi direction
    g2: np.ndarray
    gsup1: np.ndarray    # (E, N, N, 3) contravariant basis
    gsup2: np.ndarray
    jac: np.ndarray      # (E, N, N) area Jacobian |g1 x g2|
    khat: np.ndarray     # (E, N, N, 3) unit surface normal
    met: np.ndarray      # (E, N, N, 2, 2) metric g_i . g_j
    metinv: np.ndarray
    mass: np.ndarray     # (E, N, N) quadrature mass w_i w_j J
    faces: FaceSet
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def min_edge_length(self) -> float:
        """Shortest element edge, by edge quadrature of |g_t|."""
        w = self.basis.weights
        len_xi_s = np.einsum("i,ei->e", w, np.sqrt(self.met[:, :, 0, 0, 0]))
        len_xi_n = np.einsum("i,ei->e", w, np.sqrt(self.met[:, :, -1, 0, 0]))
        len_eta_w = np.einsum("j,ej->e", w, np.sqrt(self.met[:, 0, :, 1, 1]))
        len_eta_e = np.einsum("j,ej->e", w, np.sqrt(self.met[:, -1, :, 1, 1]))
        return float(np.min(np.stack([len_xi_s, len_xi_n, len_eta_w, len_eta_e])))


def side_nodes(side: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(i, j) node indices along a side, in natural (ascending) edge order."""
    r = np.arange(n)
    if side == WEST:
        return np.zeros(n, dtype=int), r
    if side == EAST:
        return np.full(n, n - 1), r
    if side == SOUTH:
        return r, np.zeros(n, dtype=int)
    if side == NORTH:
        return r, np.full(n, n - 1)
    raise ValueError(f"bad side code {side}")


def _seam_cells(side: int, k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Element grid coordinates of the cells lining a panel side."""
    if side == WEST:
        return np.zeros_like(k), k
    if side == EAST:
        return np.full_like(k, n - 1), k
    if side == SOUTH:
        return k, np.zeros_like(k)
    return k, np.full_like(k, n - 1)


def _face_geometry(mesh_arrays, elem, side, basis):
    """Outward normal, ccw tangent, edge scale and lift weights on one side."""
    g1, g2, gsup1, gsup2, jac, khat, met = mesh_arrays
    n = basis.n
    ii, jj = side_nodes(side, n)
    if side in (WEST, EAST):
        sign = -1.0 if side == WEST else 1.0
        nsup = gsup1[elem, ii, jj]
        scale = np.sqrt(met[elem, ii, jj, 1, 1])  # |g2|
    else:
        sign = -1.0 if side == SOUTH else 1.0
        nsup = gsup2[elem, ii, jj]
        scale = np.sqrt(met[elem, ii, jj, 0, 0])  # |g1|
    normal = sign * nsup / np.linalg.norm(nsup, axis=-1, keepdims=True)
    tangent = np.cross(khat[elem, ii, jj], normal)
    w_end = basis.weights[0]
    lift = scale / (w_end * jac[elem, ii, jj])
    return normal, tangent, scale, lift


def _build_faces(pairs, mesh_arrays, basis, nelem):
    """Assemble the FaceSet from (elem_m, side_m, elem_p, side_p, rev) tuples."""
    n = basis.n
    nf = len(pairs)
    elem_m = np.array([p[0] for p in pairs], dtype=int)
    side_m = np.array([p[1] for p in pairs], dtype=int)
    elem_p = np.array([p[2] for p in pairs], dtype=int)
    side_p = np.array([p[3] for p in pairs], dtype=int)
    rev = np.array([p[4] for p in pairs], dtype=bool)

    idx_m = np.empty((nf, n), dtype=int)
    idx_p = np.empty((nf, n), dtype=int)
    normal = np.empty((nf, n, 3))
    tangent = np.empty((nf, n, 3))
    scale = np.empty((nf, n))
    lift_m = np.empty((nf, n))
    lift_p = np.empty((nf, n))
    jac = mesh_arrays[4]

    for f in range(nf):
        im, jm = side_nodes(side_m[f], n)
        idx_m[f] = elem_m[f] * n * n + im * n + jm
        ip, jp = side_nodes(side_p[f], n)
        if rev[f]:
            ip, jp = ip[::-1], jp[::-1]
        idx_p[f] = elem_p[f] * n * n + ip * n + jp
        normal[f], tangent[f], scale[f], lift_m[f] = _face_geometry(
            mesh_arrays, elem_m[f], side_m[f], basis
        )
        lift_p[f] = scale[f] / (basis.weights[0] * jac[elem_p[f], ip, jp])

    # Covariant components of each side's outward normal, used to push
    # scalar momentum-flux corrections into the covariant equations.
    g1f = mesh_arrays[0].reshape(-1, 3)
    g2f = mesh_arrays[1].reshape(-1, 3)
    ncov_m = np.stack([
        np.einsum("fnk,fnk->fn", normal, g1f[idx_m]),
        np.einsum("fnk,fnk->fn", normal, g2f[idx_m]),
    ], axis=-1)
    ncov_p = np.stack([
        -np.einsum("fnk,fnk->fn", normal, g1f[idx_p]),
        -np.einsum("fnk,fnk->fn", normal, g2f[idx_p]),
    ], axis=-1)

    return FaceSet(
        elem_m=elem_m, side_m=side_m, elem_p=elem_p, side_p=side_p,
        reversed_=rev, idx_m=idx_m, idx_p=idx_p, normal=normal,
        tangent=tangent, scale=scale, lift_m=lift_m, lift_p=lift_p,
        ncov_m=ncov_m, ncov_p=ncov_p,
    )


def _finish_mesh(kind, basis, x, g1, g2, params, pairs):
    cross = np.cross(g1, g2)
    jac = np.linalg.norm(cross, axis=-1)
    khat = cross / jac[..., None]
    met = np.empty(x.shape[:3] + (2, 2))
    met[..., 0, 0] = np.einsum("...k,...k->...", g1, g1)
    met[..., 0, 1] = met[..., 1, 0] = np.einsum("...k,...k->...", g1, g2)
    met[..., 1, 1] = np.einsum("...k,...k->...", g2, g2)
    det = met[..., 0, 0] * met[..., 1, 1] - met[..., 0, 1] ** 2
    metinv = np.empty_like(met)
    metinv[..., 0, 0] = met[..., 1, 1] / det
    metinv[..., 1, 1] = met[..., 0, 0] / det
    metinv[..., 0, 1] = metinv[..., 1, 0] = -met[..., 0, 1] / det
    gsup1 = metinv[..., 0, 0, None] * g1 + metinv[..., 0, 1, None] * g2
    gsup2 = metinv[..., 1, 0, None] * g1 + metinv[..., 1, 1, None] * g2
    w2d = np.outer(basis.weights, basis.weights)
    mass = w2d[None] * jac

    mesh_arrays = (g1, g2, gsup1, gsup2, jac, khat, met)
    faces = _build_faces(pairs, mesh_arrays, basis, x.shape[0])
    return Mesh(
        kind=kind, basis=basis, nelem=x.shape[0], x=x, g1=g1, g2=g2,
        gsup1=gsup1, gsup2=gsup2, jac=jac, khat=khat, met=met,
        metinv=metinv, mass=mass, faces=faces, params=params,
    )


def cubed_sphere_mesh(n: int, p: int, radius: float = 6.37122e6) -> Mesh:
    """Equiangular cubed sphere: 6 panels of n x n elements of order p.

    Panel coordinates (alpha, beta) in [-pi/4, pi/4]^2 map gnomonically via
    X = tan(alpha), Y = tan(beta) onto the sphere of the given radius.
    """
    if n < 1:
        raise ValueError(f"need at least one element per panel side, got n={n}")
    basis = make_basis(p)
    nn = basis.n
    a = radius
    nelem = 6 * n * n
    x = np.empty((nelem, nn, nn, 3))
    g1 = np.empty_like(x)
    g2 = np.empty_like(x)

    dab = (np.pi / 2) / n  # panel side angle / elements per side
    half = dab / 2
    edges = -np.pi / 4 + dab * np.arange(n + 1)

    for panel in range(6):
        c0, c1, c2 = PANEL_FRAMES[panel]
        for ej in range(n):
            for ei in range(n):
                eid = panel * n * n + ej * n + ei
                alpha = edges[ei] + half * (basis.nodes + 1.0)
                beta = edges[ej] + half * (basis.nodes + 1.0)
                xx = np.tan(alpha)[:, None]        # (N, 1)
                yy = np.tan(beta)[None, :]         # (1, N)
                v = c0[None, None] + xx[..., None] * c1 + yy[..., None] * c2
                rho2 = 1.0 + xx**2 + yy**2
                rho = np.sqrt(rho2)
                pos = a * v / rho[..., None]
                # dP/dX = (a/rho) (c1 - v X / rho^2), chain rule dX/dxi = sec^2(alpha) * half
                dpdx = (a / rho[..., None]) * (c1 - v * (xx / rho2)[..., None])
                dpdy = (a / rho[..., None]) * (c2 - v * (yy / rho2)[..., None])
                x[eid] = pos
                g1[eid] = dpdx * ((1.0 + xx**2) * half)[..., None]
                g2[eid] = dpdy * ((1.0 + yy**2) * half)[..., None]

    pairs = []
    eid = lambda panel, i, j: panel * n * n + j * n + i
    for panel in range(6):
        for j in range(n):
            for i in range(n):
                if i < n - 1:
                    pairs.append((eid(panel, i, j), EAST, eid(panel, i + 1, j), WEST, False))
                if j < n - 1:
                    pairs.append((eid(panel, i, j), NORTH, eid(panel, i, j + 1), SOUTH, False))
    k = np.arange(n)
    for pa, sa, pb, sb, rev in CUBE_SEAMS:
        kb = k[::-1] if rev else k
        ia, ja = _seam_cells(sa, k, n)
        ib, jb = _seam_cells(sb, kb, n)
        for m in range(n):
            pairs.append((eid(pa, ia[m], ja[m]), sa, eid(pb, ib[m], jb[m]), sb, rev))

    params = {"n": n, "p": p, "radius": a}
    return _finish_mesh("cubed_sphere", basis, x, g1, g2, params, pairs)


def periodic_plane_mesh(nx: int, ny: int, p: int, lx: float = 1.0, ly: float = 1.0) -> Mesh:
    """Uniform doubly periodic plane: nx x ny elements covering [0,Lx] x [0,Ly]."""
    if nx < 1 or ny < 1:
        raise ValueError(f"need at least one element per direction, got {nx} x {ny}")
    basis = make_basis(p)
    nn = basis.n
    nelem = nx * ny
    x = np.zeros((nelem, nn, nn, 3))
    sx, sy = lx / (2 * nx), ly / (2 * ny)
    for j in range(ny):
        for i in range(nx):
            e = j * nx + i
            xs = (i + (basis.nodes + 1.0) / 2) * (lx / nx)
            ys = (j + (basis.nodes + 1.0) / 2) * (ly / ny)
            x[e, :, :, 0] = xs[:, None]
            x[e, :, :, 1] = ys[None, :]
    g1 = np.zeros_like(x)
    g2 = np.zeros_like(x)
    g1[..., 0] = sx
    g2[..., 1] = sy

    pairs = []
    eid = lambda i, j: j * nx + i
    for j in range(ny):
        for i in range(nx):
            pairs.append((eid(i, j), EAST, eid((i + 1) % nx, j), WEST, False))
            pairs.append((eid(i, j), NORTH, eid(i, (j + 1) % ny), SOUTH, False))

    params = {"nx": nx, "ny": ny, "p": p, "lx": lx, "ly": ly}
    return _finish_mesh("periodic_plane", basis, x, g1, g2, params, pairs)


def trace_scalar(mesh: Mesh, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minus/plus side traces of a scalar field, (nf, N) each, matched slots."""
    flat = f.reshape(mesh.nelem * mesh.n * mesh.n)
    return flat[mesh.faces.idx_m], flat[mesh.faces.idx_p]


def trace_vector(mesh: Mesh, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Traces of a Cartesian (E,N,N,3) field, (nf, N, 3) each."""
    flat = v.reshape(mesh.nelem * mesh.n * mesh.n, 3)
    return flat[mesh.faces.idx_m], flat[mesh.faces.idx_p]


def total_area(mesh: Mesh) -> float:
    return float(np.sum(mesh.mass))


def dump_mesh(mesh: Mesh, path) -> None:
    """Text header plus little-endian float64 node coordinate block."""
    hdr = [f"kind {mesh.kind}"]
    for key, val in mesh.params.items():
        hdr.append(f"{key} {val}")
    hdr.append(f"nelem {mesh.nelem}")
    hdr.append("layout element-major,node-row-major,xyz")
    hdr.append("end_header")
    with open(path, "wb") as fh:
        fh.write(("\n".join(hdr) + "\n").encode("ascii"))
        fh.write(mesh.x.astype("<f8").tobytes())
