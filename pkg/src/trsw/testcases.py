"""Initial conditions: steady thermal zonal flow, barotropic jet, fixtures.

All spherical cases parameterize latitude theta = arcsin(z/a) and longitude
lambda = atan2(y, x) in (-pi, pi], with the zonal unit vector
e_lambda = (-y, x, 0)/|(x, y)|.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InvalidStateError
from .mesh import Mesh
from .solver import State

# steady zonal flow parameters
U0_STEADY = 38.61068          # m/s
PHI0_STEADY = 2.94e4          # m^2/s^2, g*H
C_STEADY = 0.05               # buoyancy modulation amplitude

# zonal jet parameters
U0_JET = 80.0                 # m/s
H_JET = 1.0e4                 # m
THETA0_JET = np.pi / 7.0
THETA1_JET = np.pi / 2.0 - THETA0_JET
THETA2_JET = np.pi / 4.0
GAMMA2_JET = 3.0
GAMMA3_JET = 15.0

PERTURBATION_FORMS = ("paper_literal", "classic_squared")


@dataclass(frozen=True)
class PlanetParams:
    radius: float = 6.37122e6   # m
    gravity: float = 9.80616    # m/s^2
    omega: float = 7.292e-5     # 1/s; f = 2 omega sin(theta)


def latitude(mesh: Mesh, params: PlanetParams) -> np.ndarray:
    return np.arcsin(np.clip(mesh.x[..., 2] / params.radius, -1.0, 1.0))


def longitude(mesh: Mesh) -> np.ndarray:
    return np.arctan2(mesh.x[..., 1], mesh.x[..., 0])


def coriolis_field(mesh: Mesh, params: PlanetParams) -> np.ndarray:
    """f = 2 omega sin(theta) on the sphere; sin(theta) = z/a exactly."""
    return 2.0 * params.omega * mesh.x[..., 2] / params.radius


def zonal_vector(mesh: Mesh, speed: np.ndarray) -> np.ndarray:
    """Eastward tangent field with nodal magnitude `speed`."""
    x, y = mesh.x[..., 0], mesh.x[..., 1]
    rho = np.hypot(x, y)
    safe = np.where(rho > 0, rho, 1.0)
    u = np.zeros(mesh.x.shape)
    u[..., 0] = np.where(rho > 0, -y / safe * speed, 0.0)
    u[..., 1] = np.where(rho > 0, x / safe * speed, 0.0)
    return u


def rest_state(mesh: Mesh, params: PlanetParams, depth: float = 1.0e4) -> State:
    h = np.full(mesh.jac.shape, depth)
    return State.from_fields(mesh, np.zeros(mesh.x.shape), h, params.gravity * h)


# ---------------------------------------------------------------------------
# steady thermal zonal flow (solid-body rotation with balanced depth and a
# depth-dependent buoyancy whose pressure contribution cancels analytically)

def steady_flow_depth(theta: np.ndarray, params: PlanetParams) -> np.ndarray:
    """h = H - (1/g)(a omega u0 + u0^2/2) sin^2(theta).

    Balances u = u0 cos(theta) against f = 2 omega sin(theta): integrating
    2 a omega u0 sin cos + u0^2 sin cos gives the single-omega amplitude.
    With the planetary values the polar depression is ~1905 m, so h stays
    positive everywhere (~1093 m at the poles).
    """
    hmean = PHI0_STEADY / params.gravity
    amp = params.radius * params.omega * U0_STEADY + 0.5 * U0_STEADY**2
    return hmean - amp / params.gravity * np.sin(theta) ** 2


def steady_flow_buoyancy(h: np.ndarray, params: PlanetParams) -> np.ndarray:
    """b = g (1 + c H / h^2); the c-term's pressure force cancels exactly."""
    hmean = PHI0_STEADY / params.gravity
    return params.gravity * (1.0 + C_STEADY * hmean / h**2)


def steady_flow_fields(mesh: Mesh, params: PlanetParams):
    """(u_cart, h, hb) of the steady state, for initialization and errors."""
    u = np.zeros(mesh.x.shape)
    u[..., 0] = -U0_STEADY / params.radius * mesh.x[..., 1]
    u[..., 1] = U0_STEADY / params.radius * mesh.x[..., 0]
    h = steady_flow_depth(latitude(mesh, params), params)
    hb = h * steady_flow_buoyancy(h, params)
    return u, h, hb


def williamson2_init(mesh: Mesh, params: PlanetParams) -> State:
    u, h, hb = steady_flow_fields(mesh, params)
    return State.from_fields(mesh, u, h, hb)


def steady_state_error(mesh: Mesh, q: np.ndarray, params: PlanetParams,
                       normalize: bool = True) -> dict:
    from .diagnostics import l2_error

    u_ref, h_ref, hb_ref = steady_flow_fields(mesh, params)
    return l2_error(mesh, q, h_ref, hb_ref, u_ref, normalize=normalize)


# ---------------------------------------------------------------------------
# unstable zonal jet with a thermal perturbation

GAMMA1_JET = np.exp(-4.0 / (THETA1_JET - THETA0_JET) ** 2)


def jet_velocity(theta) -> np.ndarray:
    """u0/gamma1 * exp(1/((theta-theta0)(theta-theta1))) inside the jet band,
    identically zero outside (the exponent tends to -inf at both edges)."""
    theta = np.asarray(theta, dtype=float)
    inside = (theta > THETA0_JET) & (theta < THETA1_JET)
    denom = np.where(inside, (theta - THETA0_JET) * (theta - THETA1_JET), -1.0)
    return np.where(inside, U0_JET / GAMMA1_JET * np.exp(1.0 / denom), 0.0)


def jet_perturbation(lam, theta, form: str = "paper_literal") -> np.ndarray:
    """p(lambda, theta) = 120 cos(theta) exp(-(gamma2 lambda)^2) * latfactor.

    The default latitude factor exp(-gamma3^2 (theta - theta2)) overflows far
    south of theta2 (it is usable only near the perturbation latitude);
    "classic_squared" uses exp(-gamma3^2 (theta - theta2)^2), finite
    everywhere, and is what batch runs use.
    """
    lam = np.asarray(lam, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if form == "paper_literal":
        lat = np.exp(-GAMMA3_JET**2 * (theta - THETA2_JET))
    elif form == "classic_squared":
        lat = np.exp(-GAMMA3_JET**2 * (theta - THETA2_JET) ** 2)
    else:
        raise ValueError(f"unknown perturbation form {form!r}")
    return 120.0 * np.cos(theta) * np.exp(-((GAMMA2_JET * lam) ** 2)) * lat


def _balance_integrand(theta: float, params: PlanetParams) -> float:
    u = float(jet_velocity(theta))
    f = 2.0 * params.omega * np.sin(theta)
    return u * (f + np.tan(theta) / params.radius * u)


def balance_integral(theta, params: PlanetParams) -> np.ndarray:
    """I(theta) = integral from -pi/2 of u (f + u tan/a); memoized per node.

    The integrand is supported on the jet band only, so the quadrature runs
    over [theta0, min(theta, theta1)] with adaptive tolerance 1e-12.
    """
    theta = np.asarray(theta, dtype=float)
    cache: dict[float, float] = {}
    flat = theta.reshape(-1)
    out = np.empty_like(flat)
    for i, th in enumerate(flat):
        key = float(th)
        if key not in cache:
            upper = min(key, THETA1_JET)
            if upper <= THETA0_JET:
                cache[key] = 0.0
            else:
                val, err = quad(_balance_integrand, THETA0_JET, upper,
                                args=(params,), epsabs=0.0, epsrel=1e-12, limit=200)
                if not np.isfinite(val) or err > 1e-9 * max(abs(val), 1e-30):
                    raise InvalidStateError(
                        f"balance quadrature failed at theta={key}: value={val}, err={err}")
                cache[key] = val
        out[i] = cache[key]
    return out.reshape(theta.shape)


def galewsky_init(mesh: Mesh, params: PlanetParams,
                  perturbation_form: str = "paper_literal",
                  with_perturbation: bool = True) -> State:
    """Balanced zonal jet with a localized thermal perturbation.

    h = H + p - (a/g) I(theta), b = g + p/120, hb = h b.
    """
    if perturbation_form not in PERTURBATION_FORMS:
        raise ValueError(f"unknown perturbation form {perturbation_form!r}")
    theta = latitude(mesh, params)
    lam = longitude(mesh)
    p = (jet_perturbation(lam, theta, perturbation_form)
         if with_perturbation else np.zeros_like(theta))
    h = H_JET + p - params.radius / params.gravity * balance_integral(theta, params)
    b = params.gravity + p / 120.0
    u = zonal_vector(mesh, jet_velocity(theta))
    return State.from_fields(mesh, u, h, h * b)


# ---------------------------------------------------------------------------
# fixtures

def constant_b_init(mesh: Mesh, params: PlanetParams, state: State,
                    b_value: float | None = None) -> State:
    """Replace the buoyancy field with hb = b_value * h (default b = g)."""
    b = params.gravity if b_value is None else b_value
    q = state.q.copy()
    q[3] = b * q[2]
    return State(q)


def plane_advection_init(mesh: Mesh, depth: float = 100.0, b0: float = 10.0,
                         u_const=(1.0, 0.0), blob_amp: float = 0.1,
                         blob_width: float = 0.1) -> State:
    """Uniform flow carrying a Gaussian buoyancy blob; plane smoke test."""
    lx, ly = mesh.params["lx"], mesh.params["ly"]
    x, y = mesh.x[..., 0], mesh.x[..., 1]
    r2 = (x - 0.5 * lx) ** 2 + (y - 0.5 * ly) ** 2
    b = b0 * (1.0 + blob_amp * np.exp(-r2 / blob_width**2))
    u = np.zeros(mesh.x.shape)
    u[..., 0], u[..., 1] = u_const
    h = np.full_like(x, depth)
    return State.from_fields(mesh, u, h, h * b)
