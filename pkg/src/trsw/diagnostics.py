"""Global invariants and error norms.

Totals over the closed mesh (fixed element-order summation):
    M = <h>,  S = <hb>,  E = <h|u|^2/2 + h(hb)/2>,  Z = <(hb)^2/(2h)>,
    W = <1, omega>   with omega the weakly diagnosed absolute vorticity.

The rate probes evaluate the chain rule of E and Z against a tendency and
return a magnitude scale alongside, so sign statements can be tested as
rate <= tol * scale without picking arbitrary absolute thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh
from .operators import inner
from .solver import absolute_vorticity, velocity_contravariant


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    M: float
    S: float
    E: float
    Z: float
    W: float

    def drifts(self, ref: "DiagnosticsRecord", w_denom: float) -> dict:
        """Relative drifts vs a reference record.

        W needs an external denominator: on the sphere <1, f> is a near
        cancellation, so |W| itself is no scale.
        """
        out = {}
        for name in ("M", "S", "E", "Z"):
            x0 = getattr(ref, name)
            out["rel" + name] = (getattr(self, name) - x0) / x0
        denom = max(abs(ref.W), w_denom)
        if denom == 0.0:
            denom = 1.0  # unrotated plane: report the absolute drift
        out["relW"] = (self.W - ref.W) / denom
        return out


def totals(mesh: Mesh, q: np.ndarray, coriolis: np.ndarray,
           t: float = 0.0) -> DiagnosticsRecord:
    h, hb = q[2], q[3]
    ucon1, ucon2 = velocity_contravariant(mesh, q)
    usq = q[0] * ucon1 + q[1] * ucon2
    one = np.ones_like(h)
    omega = absolute_vorticity(mesh, q, coriolis)
    return DiagnosticsRecord(
        t=t,
        M=inner(mesh, one, h),
        S=inner(mesh, one, hb),
        E=inner(mesh, one, 0.5 * h * usq + 0.5 * h * hb),
        Z=inner(mesh, one, 0.5 * hb * hb / h),
        W=inner(mesh, one, omega),
    )


def vorticity_scale(mesh: Mesh, coriolis: np.ndarray) -> float:
    """<1, |f|>, the natural denominator for total-vorticity drift."""
    return inner(mesh, np.ones_like(coriolis), np.abs(coriolis))


def entropy_rate(mesh: Mesh, q: np.ndarray, dq: np.ndarray):
    """(Zdot, scale): Zdot = sum_m [ -<b^2/2, dh> + <b, dhb> ]."""
    b = q[3] / q[2]
    half_b2 = 0.5 * b * b
    zdot = -inner(mesh, half_b2, dq[2]) + inner(mesh, b, dq[3])
    scale = inner(mesh, half_b2, np.abs(dq[2])) + inner(mesh, np.abs(b), np.abs(dq[3]))
    return zdot, scale


def energy_rate(mesh: Mesh, q: np.ndarray, dq: np.ndarray):
    """(Edot, scale): Edot = sum_m [ <F, du> + <G, dh> + <h/2, dhb> ].

    <F, du> pairs contravariant F with the covariant velocity tendency.
    """
    h, hb = q[2], q[3]
    ucon1, ucon2 = velocity_contravariant(mesh, q)
    fcon1, fcon2 = h * ucon1, h * ucon2
    pot = 0.5 * (q[0] * ucon1 + q[1] * ucon2) + 0.5 * hb
    fdu = float(np.sum(mesh.mass * (fcon1 * dq[0] + fcon2 * dq[1])))
    edot = fdu + inner(mesh, pot, dq[2]) + inner(mesh, 0.5 * h, dq[3])
    scale = float(np.sum(mesh.mass * (np.abs(fcon1 * dq[0]) + np.abs(fcon2 * dq[1])))) \
        + inner(mesh, np.abs(pot), np.abs(dq[2])) + inner(mesh, 0.5 * h, np.abs(dq[3]))
    return edot, scale


_DENSE_RULES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _dense_rule(nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interpolation matrix and 2d weights of a 2(p+1)-point Gauss rule."""
    from .basis import lagrange_eval_1d

    key = nodes.size
    if key not in _DENSE_RULES:
        xq, wq = np.polynomial.legendre.leggauss(2 * nodes.size)
        interp = np.array([lagrange_eval_1d(nodes, x) for x in xq])
        _DENSE_RULES[key] = (interp, np.multiply.outer(wq, wq))
    return _DENSE_RULES[key]


def _dense_sq(mesh: Mesh, fields: np.ndarray) -> float:
    """integral of sum_k f_k^2 J, overintegrated.

    f^2 J is degree 2p times a curved Jacobian, past GLL exactness; the
    collocated norm aliases it badly enough on coarse spheres to distort
    convergence slopes, so error norms interpolate to a dense Gauss grid.
    Conservation probes keep the GLL inner products: the budgets are
    statements about the scheme's own quadrature.
    """
    interp, w2d = _dense_rule(mesh.basis.nodes)
    jq = np.einsum("ai,bj,eij->eab", interp, interp, mesh.jac)
    fq = np.einsum("ai,bj,...eij->...eab", interp, interp, fields)
    if fq.ndim == 4:
        sq = np.einsum("keab,keab->eab", fq, fq)
    else:
        sq = fq * fq
    return float(np.sum(w2d * sq * jq))


def l2_error(mesh: Mesh, q: np.ndarray, h_ref: np.ndarray, hb_ref: np.ndarray,
             u_cart_ref: np.ndarray, normalize: bool = True) -> dict:
    """Overintegrated L2 errors of h, hb and the Cartesian velocity vector."""
    from .solver import velocity_cartesian

    du = np.moveaxis(velocity_cartesian(mesh, q) - u_cart_ref, -1, 0)
    out = {
        "h": np.sqrt(_dense_sq(mesh, q[2] - h_ref)),
        "hb": np.sqrt(_dense_sq(mesh, q[3] - hb_ref)),
        "u": np.sqrt(_dense_sq(mesh, du)),
    }
    if normalize:
        uref = _dense_sq(mesh, np.moveaxis(u_cart_ref, -1, 0))
        out["h"] /= np.sqrt(_dense_sq(mesh, h_ref))
        out["hb"] /= np.sqrt(_dense_sq(mesh, hb_ref))
        if uref > 0:
            out["u"] /= np.sqrt(uref)
    return out


def convergence_slope(spacings, errors) -> float:
    """Least-squares slope of log(error) against log(spacing)."""
    s = np.log(np.asarray(spacings, dtype=float))
    e = np.log(np.asarray(errors, dtype=float))
    return float(np.polyfit(s, e, 1)[0])
