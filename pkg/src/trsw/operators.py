"""Collocated curvilinear operators on a Mesh.

Vector fields live in covariant components (E, N, N, 2); scalars are
(E, N, N).  Derivatives subtract each element's corner value before
applying D, which is exact for polynomials and makes derivatives of
constant fields bitwise zero.

With the GLL quadrature these operators satisfy a discrete divergence
theorem: <phi, div w> + <grad phi, w> = sum over edges of w_q |g_t| phi (w . n),
with the edge scale |g_t| = |g2| on xi-faces and |g1| on eta-faces.
"""
from __future__ import annotations

import numpy as np

from .mesh import EAST, NORTH, SOUTH, WEST, Mesh, side_nodes


def dxi(mesh: Mesh, f: np.ndarray) -> np.ndarray:
    """d/dxi along node axis 1, corner-offset stabilized."""
    return np.matmul(mesh.basis.diff, f - f[:, :1, :1])


def deta(mesh: Mesh, f: np.ndarray) -> np.ndarray:
    """d/deta along node axis 2."""
    return np.matmul(f - f[:, :1, :1], mesh.basis.diff.T)


def to_contravariant(mesh: Mesh, w: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...j->...i", mesh.metinv, w)


def to_cartesian(mesh: Mesh, w: np.ndarray) -> np.ndarray:
    wc = to_contravariant(mesh, w)
    return wc[..., :1] * mesh.g1 + wc[..., 1:] * mesh.g2


def from_cartesian(mesh: Mesh, v: np.ndarray) -> np.ndarray:
    """Covariant components of (the tangential part of) a Cartesian field."""
    w = np.empty(v.shape[:3] + (2,))
    w[..., 0] = np.einsum("...k,...k->...", v, mesh.g1)
    w[..., 1] = np.einsum("...k,...k->...", v, mesh.g2)
    return w


def divergence(mesh: Mesh, w: np.ndarray) -> np.ndarray:
    """div w = (1/J) [ d(J w^1)/dxi + d(J w^2)/deta ]."""
    wc = to_contravariant(mesh, w)
    return (dxi(mesh, mesh.jac * wc[..., 0]) + deta(mesh, mesh.jac * wc[..., 1])) / mesh.jac


def divergence_contra(mesh: Mesh, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """Divergence from contravariant components directly."""
    return (dxi(mesh, mesh.jac * w1) + deta(mesh, mesh.jac * w2)) / mesh.jac


def gradient(mesh: Mesh, phi: np.ndarray) -> np.ndarray:
    """Covariant components of grad phi, i.e. (d phi/dxi, d phi/deta)."""
    out = np.empty(phi.shape + (2,))
    out[..., 0] = dxi(mesh, phi)
    out[..., 1] = deta(mesh, phi)
    return out


def gradient_cartesian(mesh: Mesh, phi: np.ndarray) -> np.ndarray:
    gp = gradient(mesh, phi)
    return gp[..., :1] * mesh.gsup1 + gp[..., 1:] * mesh.gsup2


def curl_scalar(mesh: Mesh, w: np.ndarray) -> np.ndarray:
    """k . curl w = (1/J) [ d w_2/dxi - d w_1/deta ] from covariant components."""
    return (dxi(mesh, w[..., 1]) - deta(mesh, w[..., 0])) / mesh.jac


def curl_k(mesh: Mesh, phi: np.ndarray) -> np.ndarray:
    """Covariant components of curl(phi k) = (1/J)(phi_eta g1 - phi_xi g2)."""
    pxi = dxi(mesh, phi)
    peta = deta(mesh, phi)
    out = np.empty(phi.shape + (2,))
    out[..., 0] = (peta * mesh.met[..., 0, 0] - pxi * mesh.met[..., 0, 1]) / mesh.jac
    out[..., 1] = (peta * mesh.met[..., 1, 0] - pxi * mesh.met[..., 1, 1]) / mesh.jac
    return out


def curl_k_cartesian(mesh: Mesh, phi: np.ndarray) -> np.ndarray:
    pxi = dxi(mesh, phi)[..., None]
    peta = deta(mesh, phi)[..., None]
    return (peta * mesh.g1 - pxi * mesh.g2) / mesh.jac[..., None]


def inner(mesh: Mesh, f: np.ndarray, g: np.ndarray, per_element: bool = False):
    """Mass-weighted inner product of two scalar fields."""
    prod = mesh.mass * f * g
    if per_element:
        return prod.sum(axis=(1, 2))
    return float(prod.sum())


def inner_vector(mesh: Mesh, v: np.ndarray, w: np.ndarray, per_element: bool = False):
    """Inner product of Cartesian vector fields (E, N, N, 3)."""
    prod = mesh.mass * np.einsum("...k,...k->...", v, w)
    if per_element:
        return prod.sum(axis=(1, 2))
    return float(prod.sum())


def boundary_integral(mesh: Mesh, v: np.ndarray, phi: np.ndarray | None = None) -> np.ndarray:
    """Per-element boundary quadrature of (phi) v . n for Cartesian v.

    Both sides of every face contribute with their own trace and outward
    normal (owner normal negated on the plus side).
    """
    fs = mesh.faces
    w = mesh.basis.weights
    vflat = v.reshape(-1, 3)
    vn_m = np.einsum("fnk,fnk->fn", vflat[fs.idx_m], fs.normal)
    vn_p = -np.einsum("fnk,fnk->fn", vflat[fs.idx_p], fs.normal)
    if phi is not None:
        pflat = phi.reshape(-1)
        vn_m = vn_m * pflat[fs.idx_m]
        vn_p = vn_p * pflat[fs.idx_p]
    quad_m = np.einsum("n,fn->f", w, fs.scale * vn_m)
    quad_p = np.einsum("n,fn->f", w, fs.scale * vn_p)
    out = np.zeros(mesh.nelem)
    np.add.at(out, fs.elem_m, quad_m)
    np.add.at(out, fs.elem_p, quad_p)
    return out


def boundary_integral_scalar(mesh: Mesh, s_minus: np.ndarray, s_plus: np.ndarray) -> np.ndarray:
    """Per-element edge quadrature of prescribed face-node scalars."""
    fs = mesh.faces
    w = mesh.basis.weights
    out = np.zeros(mesh.nelem)
    np.add.at(out, fs.elem_m, np.einsum("n,fn->f", w, fs.scale * s_minus))
    np.add.at(out, fs.elem_p, np.einsum("n,fn->f", w, fs.scale * s_plus))
    return out


def lift_faces(mesh: Mesh, s_minus: np.ndarray, s_plus: np.ndarray) -> np.ndarray:
    """Scatter face-node scalars into a volume field via the inverse mass.

    The returned field r satisfies <phi, r> = <phi, s>_boundary for every
    nodal test function phi; corner nodes accumulate both adjacent edges.
    """
    fs = mesh.faces
    flat = np.zeros(mesh.nelem * mesh.n * mesh.n)
    np.add.at(flat, fs.idx_m, s_minus * fs.lift_m)
    np.add.at(flat, fs.idx_p, s_plus * fs.lift_p)
    return flat.reshape(mesh.nelem, mesh.n, mesh.n)


def element_boundary_nodes(mesh: Mesh):
    """(elem, i, j, normal, tangent, scale, w) rows for every element side.

    Test helper enumerating the boundary quadrature exactly as the face
    kernels see it.
    """
    fs = mesh.faces
    rows = []
    w = mesh.basis.weights
    for f in range(fs.count):
        im, jm = side_nodes(int(fs.side_m[f]), mesh.n)
        rows.append((int(fs.elem_m[f]), im, jm, fs.normal[f], fs.tangent[f], fs.scale[f], w))
        ip, jp = side_nodes(int(fs.side_p[f]), mesh.n)
        if fs.reversed_[f]:
            ip, jp = ip[::-1], jp[::-1]
        rows.append((int(fs.elem_p[f]), ip, jp, -fs.normal[f], -fs.tangent[f], fs.scale[f], w))
    return rows
