"""Batch runs: config -> mesh/state/scheme, time loop, artifacts on disk.

Also hosts the named experiment suites (spatial and temporal convergence,
split-variant comparison) used by the CLI and the acceptance tests.
"""
from __future__ import annotations

import csv
import os
import time as _time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import (MeshSection, OutputSection, RunConfig, SchemeSection,
                     TestcaseSection, TimeSection)
from .diagnostics import (DiagnosticsRecord, convergence_slope, energy_rate,
                          entropy_rate, totals, vorticity_scale)
from .errors import BlowUpError, InvalidStateError
from .fluxes import FluxConfig, conservative_flux, dissipative_flux
from .mesh import Mesh, cubed_sphere_mesh, periodic_plane_mesh
from .output import DiagnosticsWriter, snapshot_path, write_snapshot
from .solver import (SchemeConfig, State, absolute_vorticity, resolve_alpha,
                     rhs, variant_scheme, wave_speed)
from .testcases import (PlanetParams, constant_b_init, coriolis_field,
                        galewsky_init, plane_advection_init, rest_state,
                        steady_state_error, williamson2_init)
from .timeint import StepController, ssp_rk3_step

OUTPUT_DIR_ENV = "TRSW_OUTPUT_DIR"

# packaged experiments run at this Courant number: the adaptive rule's
# 0.8 default exceeds the measured nonlinear stability boundary of the
# conservative scheme on coarse sphere meshes (~0.35 at 6x8x8, p=3)
EXPERIMENT_CFL = 0.25


def planet_from_config(cfg: RunConfig) -> PlanetParams:
    return PlanetParams(radius=cfg.planet.radius, gravity=cfg.planet.gravity,
                        omega=cfg.planet.omega)


def build_mesh(cfg: RunConfig) -> Mesh:
    m = cfg.mesh
    if m.kind == "cubed_sphere":
        return cubed_sphere_mesh(m.n, m.p, radius=cfg.planet.radius)
    return periodic_plane_mesh(m.nx, m.ny, m.p, m.lx, m.ly)


def initial_state(cfg: RunConfig, mesh: Mesh):
    """(State, coriolis field) for the configured test case."""
    params = planet_from_config(cfg)
    tc = cfg.testcase
    if mesh.kind == "cubed_sphere":
        coriolis = coriolis_field(mesh, params)
    else:
        coriolis = np.full(mesh.jac.shape, cfg.planet.f_plane)

    if tc.name == "rest":
        state = rest_state(mesh, params, depth=tc.depth)
    elif tc.name == "steady_zonal":
        state = williamson2_init(mesh, params)
    elif tc.name == "galewsky":
        state = galewsky_init(mesh, params,
                              perturbation_form=tc.perturbation_form,
                              with_perturbation=tc.with_perturbation)
    elif tc.name == "plane_blob":
        state = plane_advection_init(mesh, depth=tc.depth, b0=tc.b0,
                                     blob_amp=tc.blob_amp,
                                     blob_width=tc.blob_width)
    else:  # unreachable past config validation
        raise InvalidStateError(f"unhandled testcase {tc.name!r}")

    if tc.b_constant is not None:
        value = params.gravity if tc.b_constant == -1.0 else tc.b_constant
        state = constant_b_init(mesh, params, state, b_value=value)
    return state, coriolis


def scheme_from_config(cfg: RunConfig) -> SchemeConfig:
    s = cfg.scheme
    if s.flux == "conservative":
        flux = conservative_flux()
    elif s.flux == "dissipative":
        flux = dissipative_flux(c_ref=s.c_ref)
    else:
        flux = FluxConfig(mode="custom", alpha=s.alpha, beta_rule=s.beta_rule,
                          c_ref=s.c_ref)
    return variant_scheme(s.variant, g=cfg.planet.gravity, flux=flux)


def validate_initial(q: np.ndarray) -> None:
    if not np.all(np.isfinite(q)):
        raise InvalidStateError("initial state contains non-finite values")
    if q[2].min() <= 0:
        raise InvalidStateError("initial depth must be positive everywhere")
    if q[3].min() <= 0:
        raise InvalidStateError("initial buoyancy must be positive everywhere")


def resolve_output_dir(cfg: RunConfig) -> Path:
    if cfg.output.directory is not None:
        return Path(cfg.output.directory)
    return Path(os.environ.get(OUTPUT_DIR_ENV, "trsw_out"))


def integrate(mesh: Mesh, q: np.ndarray, scheme: SchemeConfig,
              controller: StepController, coriolis: np.ndarray,
              duration: float, step_hook=None):
    """March to `duration` seconds; returns (q, t, steps).

    The hook sees each completed step: step_hook(step, t, dt, q).
    Raises BlowUpError on non-finite stages and InvalidStateError when the
    depth or weighted buoyancy loses positivity.
    """
    t = 0.0
    step = 0
    eps = 1e-9 * max(duration, 1.0)
    while t + eps < duration:
        c = wave_speed(mesh, q)
        dt = min(controller.dt(c), duration - t)
        alpha = resolve_alpha(mesh, q, scheme)
        q = ssp_rk3_step(q, dt, lambda s: rhs(mesh, s, scheme, coriolis, alpha),
                         step_index=step)
        step += 1
        t += dt
        if not (q[2].min() > 0 and q[3].min() > 0):
            raise InvalidStateError(
                f"nonpositive depth or buoyancy after step {step} (t={t:.1f} s)")
        if step_hook is not None:
            step_hook(step, t, dt, q)
    return q, t, step


@dataclass
class RunResult:
    steps: int
    t_seconds: float
    wall_seconds: float
    first: DiagnosticsRecord
    last: DiagnosticsRecord
    drifts: dict
    mesh: Mesh
    state: np.ndarray
    coriolis: np.ndarray
    diagnostics_file: Path | None
    snapshot_files: list


def _snapshot_fields(cfg, mesh, q, coriolis) -> dict:
    fields = {
        "x": mesh.x[..., 0], "y": mesh.x[..., 1], "z": mesh.x[..., 2]}
    derived = {
        "h": lambda: q[2],
        "hb": lambda: q[3],
        "b": lambda: q[3] / q[2],
        "u1": lambda: q[0],
        "u2": lambda: q[1],
        "vorticity": lambda: absolute_vorticity(mesh, q, coriolis),
        "coriolis": lambda: coriolis,
    }
    for name in cfg.output.snapshot_fields:
        fields[name] = derived[name]()
    return fields


def run_simulation(cfg: RunConfig, out_dir=None) -> RunResult:
    """Integrate per config; diagnostics.csv plus optional snapshots."""
    mesh = build_mesh(cfg)
    state, coriolis = initial_state(cfg, mesh)
    validate_initial(state.q)
    scheme = scheme_from_config(cfg)
    controller = StepController(dx=mesh.min_edge_length, p=cfg.mesh.p,
                                cfl=cfg.time.cfl, fixed_dt=cfg.time.fixed_dt)

    out = Path(out_dir) if out_dir is not None else resolve_output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    diag_file = out / "diagnostics.csv"
    snap_every = cfg.output.snapshot_every
    snapshots: list = []

    if cfg.mesh.kind == "cubed_sphere":
        xs, xn = cfg.mesh.n, cfg.mesh.n
        par0, par1 = cfg.planet.radius, 0.0
    else:
        xs, xn = cfg.mesh.nx, cfg.mesh.ny
        par0, par1 = cfg.mesh.lx, cfg.mesh.ly

    def snapshot(step, t, q):
        path = snapshot_path(out, step)
        write_snapshot(path, kind=cfg.mesh.kind, nx=xs, ny=xn, p=cfg.mesh.p,
                       step=step, t=t, param0=par0, param1=par1,
                       fields=_snapshot_fields(cfg, mesh, q, coriolis))
        snapshots.append(path)

    wall0 = _time.perf_counter()
    ref = totals(mesh, state.q, coriolis, t=0.0)
    w_denom = vorticity_scale(mesh, coriolis)

    with DiagnosticsWriter(diag_file) as writer:
        writer.write(0, 0.0, ref, ref.drifts(ref, w_denom), 0.0)
        if snap_every > 0:
            snapshot(0, 0.0, state.q)
        written = {"diag": 0, "snap": 0, "dt": 0.0}
        last = {"rec": ref, "drifts": ref.drifts(ref, w_denom)}

        def hook(step, t, dt, q):
            written["dt"] = dt
            if step % cfg.output.diagnostics_every == 0:
                rec = totals(mesh, q, coriolis, t=t)
                drifts = rec.drifts(ref, w_denom)
                writer.write(step, t, rec, drifts, dt)
                written["diag"] = step
                last["rec"], last["drifts"] = rec, drifts
            if snap_every > 0 and step % snap_every == 0:
                snapshot(step, t, q)
                written["snap"] = step

        q, t, steps = integrate(mesh, state.q, scheme, controller, coriolis,
                                cfg.time.duration_seconds, step_hook=hook)

        if steps > 0 and written["diag"] != steps:
            rec = totals(mesh, q, coriolis, t=t)
            drifts = rec.drifts(ref, w_denom)
            writer.write(steps, t, rec, drifts, written["dt"])
            last["rec"], last["drifts"] = rec, drifts
        if snap_every > 0 and steps > 0 and written["snap"] != steps:
            snapshot(steps, t, q)

    wall = _time.perf_counter() - wall0
    return RunResult(steps=steps, t_seconds=t, wall_seconds=wall, first=ref,
                     last=last["rec"], drifts=last["drifts"], mesh=mesh,
                     state=q, coriolis=coriolis, diagnostics_file=diag_file,
                     snapshot_files=snapshots)


# ---------------------------------------------------------------------------
# experiment suites

def _echo(echo, msg):
    if callable(echo):
        echo(msg)
    elif echo:
        print(msg)


def _base_output(every=1000000000):
    # experiments keep their own tables; per-run CSVs stay sparse
    return OutputSection(directory=None, diagnostics_every=every,
                         snapshot_every=0)


def experiment_spatial_w2(out_dir, days=5.0, resolutions=(4, 8, 16), p=3,
                          echo=None) -> dict:
    """Steady zonal flow error vs resolution for both flux modes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = []
    summary = {}
    for mode in ("conservative", "dissipative"):
        dxs, errs = [], []
        for n in resolutions:
            cfg = RunConfig(
                testcase=TestcaseSection(name="steady_zonal"),
                mesh=MeshSection(kind="cubed_sphere", p=p, n=n),
                time=TimeSection(duration_seconds=days * 86400.0, cfl=EXPERIMENT_CFL),
                scheme=SchemeSection(variant="full", flux=mode),
                output=_base_output(),
            )
            res = run_simulation(cfg, out_dir=out / f"{mode}_n{n}")
            err = steady_state_error(res.mesh, res.state, planet_from_config(cfg))
            # average nodal spacing: circumference / (nodal gaps around a
            # coordinate great circle), exactly proportional to 1/n
            planet = planet_from_config(cfg)
            dxs.append(2.0 * np.pi * planet.radius / (4 * n * p))
            errs.append(err["h"])
            table.append((mode, n, dxs[-1], err["h"], err["hb"], err["u"]))
            _echo(echo, f"{mode} n={n}: err_h={err['h']:.3e} "
                        f"({res.steps} steps, {res.wall_seconds:.1f} s)")
        slope = convergence_slope(dxs, errs)
        summary[mode] = {"n": list(resolutions), "dx": dxs, "err_h": errs,
                         "slope": slope}
        _echo(echo, f"{mode} slope: {slope:.2f}")

    with open(out / "w2_convergence.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("mode", "n", "dx", "err_h", "err_hb", "err_u"))
        for row in table:
            w.writerow([row[0], row[1]] + [repr(float(v)) for v in row[2:]])
        for mode in summary:
            w.writerow((f"slope_{mode}", "", "", repr(summary[mode]["slope"]),
                        "", ""))
    return summary


def experiment_temporal_conservation(out_dir, hours=2.0, n=5, p=3,
                                     dt0=450.0, echo=None) -> dict:
    """Energy/entropy drift vs fixed timestep, conservative fluxes.

    Semi-discrete E and Z are exact for this scheme, so the measured drift
    is the RK3 time-integration error and must shrink at third order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dts = [dt0, dt0 / 2, dt0 / 4]
    rows = []
    for dt in dts:
        cfg = RunConfig(
            testcase=TestcaseSection(name="galewsky",
                                     perturbation_form="classic_squared"),
            mesh=MeshSection(kind="cubed_sphere", p=p, n=n),
            time=TimeSection(duration_seconds=hours * 3600.0, fixed_dt=dt),
            scheme=SchemeSection(variant="full", flux="conservative"),
            output=_base_output(),
        )
        res = run_simulation(cfg, out_dir=out / f"dt{int(dt)}")
        rows.append((dt, res.steps, abs(res.drifts["relE"]),
                     abs(res.drifts["relZ"])))
        _echo(echo, f"dt={dt:.1f}: |relE|={rows[-1][2]:.3e} "
                    f"|relZ|={rows[-1][3]:.3e}")

    slope_e = convergence_slope([r[0] for r in rows], [r[2] for r in rows])
    slope_z = convergence_slope([r[0] for r in rows], [r[3] for r in rows])
    with open(out / "temporal_conservation.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("dt", "steps", "abs_relE", "abs_relZ"))
        for row in rows:
            w.writerow([repr(float(row[0])), row[1],
                        repr(float(row[2])), repr(float(row[3]))])
        w.writerow(("slope", "", repr(slope_e), repr(slope_z)))
    _echo(echo, f"slopes: E {slope_e:.2f}, Z {slope_z:.2f}")
    return {"dts": dts, "relE": [r[2] for r in rows],
            "relZ": [r[3] for r in rows],
            "slope_E": slope_e, "slope_Z": slope_z}


def experiment_variants(out_dir, hours=24.0, n=8, p=3, echo=None) -> dict:
    """Per-step entropy/energy rate probes for the two partial variants.

    entropy_only runs with upwind buoyancy + adaptive interface dissipation
    (entropy rate must stay <= 0); energy_only keeps alpha > 0 but a centered
    buoyancy flux, so energy decays while entropy is free to grow.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for variant in ("entropy_only", "energy_only"):
        cfg = RunConfig(
            testcase=TestcaseSection(name="galewsky",
                                     perturbation_form="classic_squared"),
            mesh=MeshSection(kind="cubed_sphere", p=p, n=n),
            time=TimeSection(duration_seconds=hours * 3600.0, cfl=EXPERIMENT_CFL),
            scheme=SchemeSection(variant=variant, flux="dissipative"),
            output=_base_output(),
        )
        mesh = build_mesh(cfg)
        state, coriolis = initial_state(cfg, mesh)
        validate_initial(state.q)
        if variant == "energy_only":
            # freeze alpha from the initial wave speed and keep b-hat centered
            c0 = wave_speed(mesh, state.q)
            flux = FluxConfig(mode="custom",
                              alpha=0.5 * cfg.planet.gravity / c0,
                              beta_rule="zero")
            scheme = variant_scheme(variant, g=cfg.planet.gravity, flux=flux)
        else:
            scheme = scheme_from_config(cfg)
        controller = StepController(dx=mesh.min_edge_length, p=p,
                                    cfl=cfg.time.cfl)

        probes = []

        def hook(step, t, dt, q, _scheme=scheme, _mesh=mesh, _cor=coriolis):
            alpha = resolve_alpha(_mesh, q, _scheme)
            dq = rhs(_mesh, q, _scheme, _cor, alpha)
            zdot, zscale = entropy_rate(_mesh, q, dq)
            edot, escale = energy_rate(_mesh, q, dq)
            rec = totals(_mesh, q, _cor, t=t)
            probes.append((step, t, zdot, zscale, edot, escale, rec.Z, rec.E))

        blowup = None
        try:
            integrate(mesh, state.q, scheme, controller, coriolis,
                      cfg.time.duration_seconds, step_hook=hook)
        except (BlowUpError, InvalidStateError) as exc:
            blowup = str(exc)

        with open(out / f"variants_{variant}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("step", "t_seconds", "zdot", "zscale", "edot",
                        "escale", "Z", "E"))
            for row in probes:
                w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])

        z_series = np.array([row[6] for row in probes])
        summary[variant] = {
            "steps": len(probes),
            "zdot_max": max((row[2] for row in probes), default=0.0),
            "zdot_scaled_max": max((row[2] / row[3] for row in probes),
                                   default=0.0),
            "edot_scaled_max": max((row[4] / row[5] for row in probes),
                                   default=0.0),
            "Z_series": z_series,
            "Z_ratio": (z_series[-1] / z_series[0]) if len(z_series) else 1.0,
            "blowup": blowup,
        }
        _echo(echo, f"{variant}: {len(probes)} steps, "
                    f"max zdot/scale={summary[variant]['zdot_scaled_max']:.2e}, "
                    f"max edot/scale={summary[variant]['edot_scaled_max']:.2e}, "
                    f"Z ratio={summary[variant]['Z_ratio']:.6f}"
                    + (f", aborted: {blowup}" if blowup else ""))
    return summary


EXPERIMENTS = {
    "spatial_w2": experiment_spatial_w2,
    "temporal_conservation": experiment_temporal_conservation,
    "variants": experiment_variants,
}
