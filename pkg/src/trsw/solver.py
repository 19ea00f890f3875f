"""Semi-discrete thermal shallow water right-hand side.

Prognostic state q = (u_1, u_2, h, hb) stacked as (4, E, N, N): covariant
velocity components, depth, and mass-weighted buoyancy.  The volume terms
use the split forms

    velocity:  -[ omega k x u + grad G + 1/4 (b grad h + grad(hb) - h grad b) ]
    depth:     -div F
    buoyancy:  -1/2 (b div F + F . grad b + div B)

with G = 1/2 u.u + 1/2 hb, F = h u, B = b F, and the absolute vorticity
omega diagnosed weakly (strong curl plus a lifted tangential jump term).
Unsplit variants swap in 1/2 b grad h and div B while keeping every
interface term unchanged.

Interface coupling happens in physical Cartesian space (local bases differ
across panel seams): single-valued F_hat, G_hat, b_hat are evaluated once
per face and both sides receive the same values, which is what makes the
discrete mass/buoyancy/vorticity telescoping exact.

All reductions and scatters run in a fixed order, so the rhs is a pure,
bitwise-deterministic function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fluxes import FluxConfig, buoyancy_flux_value, conservative_flux, max_wave_speed
from .mesh import Mesh
from .operators import divergence_contra, dxi, deta, lift_faces


@dataclass
class State:
    """Nodal prognostic fields, stacked for axpy-friendly time stepping."""

    q: np.ndarray  # (4, E, N, N)

    @property
    def u1(self) -> np.ndarray:
        return self.q[0]

    @property
    def u2(self) -> np.ndarray:
        return self.q[1]

    @property
    def h(self) -> np.ndarray:
        return self.q[2]

    @property
    def hb(self) -> np.ndarray:
        return self.q[3]

    def copy(self) -> "State":
        return State(self.q.copy())

    @classmethod
    def from_fields(cls, mesh: Mesh, u_cart: np.ndarray, h: np.ndarray,
                    hb: np.ndarray) -> "State":
        """Project a Cartesian velocity onto covariant components."""
        q = np.empty((4,) + h.shape)
        q[0] = np.einsum("...k,...k->...", u_cart, mesh.g1)
        q[1] = np.einsum("...k,...k->...", u_cart, mesh.g2)
        q[2] = h
        q[3] = hb
        return cls(q)


@dataclass(frozen=True)
class SchemeConfig:
    g: float = 9.80616
    split_pressure: bool = True
    split_buoyancy: bool = True
    flux: FluxConfig = field(default_factory=conservative_flux)


SCHEME_VARIANTS = ("full", "entropy_only", "energy_only")

# variant -> (split_pressure, split_buoyancy); the names say which stability
# statement survives, and both partial variants keep the full interface terms
_VARIANT_SPLITS = {
    "full": (True, True),
    "entropy_only": (False, True),
    "energy_only": (False, False),
}


def variant_scheme(name: str, g: float = 9.80616,
                   flux: FluxConfig | None = None) -> SchemeConfig:
    """Splitting presets: the full method and its two partial variants.

    "entropy_only" splits the buoyancy equation but not the pressure term,
    "energy_only" uses no splitting at all; both keep the full method's
    interface terms.
    """
    flux = flux if flux is not None else conservative_flux()
    if name not in _VARIANT_SPLITS:
        raise ValueError(f"unknown scheme variant {name!r}")
    sp, sb = _VARIANT_SPLITS[name]
    return SchemeConfig(g=g, split_pressure=sp, split_buoyancy=sb, flux=flux)


def velocity_contravariant(mesh: Mesh, q: np.ndarray):
    ucon1 = mesh.metinv[..., 0, 0] * q[0] + mesh.metinv[..., 0, 1] * q[1]
    ucon2 = mesh.metinv[..., 1, 0] * q[0] + mesh.metinv[..., 1, 1] * q[1]
    return ucon1, ucon2


def velocity_cartesian(mesh: Mesh, q: np.ndarray) -> np.ndarray:
    ucon1, ucon2 = velocity_contravariant(mesh, q)
    return ucon1[..., None] * mesh.g1 + ucon2[..., None] * mesh.g2


def wave_speed(mesh: Mesh, q: np.ndarray) -> float:
    """Fastest nodal |u| + sqrt(h b); drives both the CFL step and alpha."""
    return max_wave_speed(velocity_cartesian(mesh, q), q[2], q[3] / q[2])


def _vorticity_jump(mesh: Mesh, u_cart: np.ndarray) -> np.ndarray:
    """Face-node values 1/2 (u_plus - u_minus) . t_minus.

    Both sides lift this same number: the plus side's tangent is -t_minus
    and its deviation from the average flips sign too.
    """
    fs = mesh.faces
    uf = u_cart.reshape(-1, 3)
    return 0.5 * np.einsum("fnk,fnk->fn", uf[fs.idx_p] - uf[fs.idx_m], fs.tangent)


def absolute_vorticity(mesh: Mesh, q: np.ndarray,
                       coriolis: np.ndarray) -> np.ndarray:
    """omega = k . curl_d u + f + lift of the tangential velocity jump."""
    curl = (dxi(mesh, q[1]) - deta(mesh, q[0])) / mesh.jac
    s = _vorticity_jump(mesh, velocity_cartesian(mesh, q))
    return curl + coriolis + lift_faces(mesh, s, s)


def rhs(mesh: Mesh, q: np.ndarray, scheme: SchemeConfig,
        coriolis: np.ndarray, alpha: float = 0.0) -> np.ndarray:
    """Tendency dq/dt = (du_1, du_2, dh, dhb); pure function of the inputs."""
    fs = mesh.faces
    h, hb = q[2], q[3]
    b = hb / h
    ucon1, ucon2 = velocity_contravariant(mesh, q)
    u_cart = ucon1[..., None] * mesh.g1 + ucon2[..., None] * mesh.g2
    fcon1, fcon2 = h * ucon1, h * ucon2
    f_cart = h[..., None] * u_cart
    pot = 0.5 * (q[0] * ucon1 + q[1] * ucon2) + 0.5 * hb

    # ---- shared face traces (Cartesian) and single-valued fluxes
    uf = u_cart.reshape(-1, 3)
    ff = f_cart.reshape(-1, 3)
    hf, bf, gf = h.reshape(-1), b.reshape(-1), pot.reshape(-1)
    h_m, h_p = hf[fs.idx_m], hf[fs.idx_p]
    b_m, b_p = bf[fs.idx_m], bf[fs.idx_p]
    g_m, g_p = gf[fs.idx_m], gf[fs.idx_p]
    fn_m = np.einsum("fnk,fnk->fn", ff[fs.idx_m], fs.normal)
    fn_p = np.einsum("fnk,fnk->fn", ff[fs.idx_p], fs.normal)

    fn_hat = 0.5 * (fn_m + fn_p)
    jump_fn_plus = fn_m - fn_p           # [F] . n_plus
    g_hat = 0.5 * (g_m + g_p) + alpha * jump_fn_plus
    b_hat = buoyancy_flux_value(b_m, b_p, fn_hat,
                                scheme.flux.effective_beta_rule, scheme.flux.beta)
    h_avg = 0.5 * (h_m + h_p)
    bn_hat = b_hat * fn_hat              # B_hat . n_minus

    # ---- absolute vorticity (weak form, shared u traces)
    s_vort = 0.5 * np.einsum("fnk,fnk->fn", uf[fs.idx_p] - uf[fs.idx_m], fs.tangent)
    omega = (dxi(mesh, q[1]) - deta(mesh, q[0])) / mesh.jac + coriolis \
        + lift_faces(mesh, s_vort, s_vort)

    # ---- volume terms
    div_f = divergence_contra(mesh, fcon1, fcon2)
    div_b = divergence_contra(mesh, b * fcon1, b * fcon2)
    if scheme.split_buoyancy:
        f_grad_b = fcon1 * dxi(mesh, b) + fcon2 * deta(mesh, b)
        dhb = -0.5 * (b * div_f + f_grad_b + div_b)
    else:
        dhb = -div_b

    if scheme.split_pressure:
        press1 = 0.25 * (b * dxi(mesh, h) + dxi(mesh, hb) - h * dxi(mesh, b))
        press2 = 0.25 * (b * deta(mesh, h) + deta(mesh, hb) - h * deta(mesh, b))
    else:
        press1 = 0.5 * b * dxi(mesh, h)
        press2 = 0.5 * b * deta(mesh, h)
    du1 = omega * mesh.jac * ucon2 - dxi(mesh, pot) - press1
    du2 = -omega * mesh.jac * ucon1 - deta(mesh, pot) - press2

    # ---- lifted interface corrections (outward-normal data per side)
    corr_m = (g_hat - g_m) + 0.5 * b_hat * (h_avg - h_m)
    corr_p = (g_hat - g_p) + 0.5 * b_hat * (h_avg - h_p)
    du1 -= lift_faces(mesh, corr_m * fs.ncov_m[..., 0], corr_p * fs.ncov_p[..., 0])
    du2 -= lift_faces(mesh, corr_m * fs.ncov_m[..., 1], corr_p * fs.ncov_p[..., 1])
    dh = -div_f - lift_faces(mesh, fn_hat - fn_m, fn_p - fn_hat)
    dhb += -lift_faces(mesh, bn_hat - b_m * fn_m, b_p * fn_p - bn_hat)

    return np.stack([du1, du2, dh, dhb])


def resolve_alpha(mesh: Mesh, q: np.ndarray, scheme: SchemeConfig) -> float:
    """Step-level alpha: 0, g/(2c) from the instantaneous state, or custom."""
    if scheme.flux.mode == "dissipative":
        return scheme.flux.resolve_alpha(scheme.g, wave_speed(mesh, q))
    return scheme.flux.resolve_alpha(scheme.g)
