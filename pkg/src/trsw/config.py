"""Run configuration: strict YAML -> dataclasses with full-path key errors.

Unknown keys are rejected rather than ignored so a typo like `snapsot_every`
cannot silently disable output. All validation happens before any mesh or
state allocation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .errors import ConfigError
from .fluxes import BETA_RULES, FLUX_MODES
from .solver import SCHEME_VARIANTS
from .testcases import PERTURBATION_FORMS

MESH_KINDS = ("cubed_sphere", "periodic_plane")
TESTCASE_NAMES = ("rest", "steady_zonal", "galewsky", "plane_blob")
SNAPSHOT_FIELDS = ("h", "hb", "b", "u1", "u2", "vorticity", "coriolis")

# keys each testcase accepts on top of the common ones
_CASE_KEYS = {
    "rest": {"depth"},
    "steady_zonal": set(),
    "galewsky": {"perturbation_form", "with_perturbation"},
    "plane_blob": {"depth", "b0", "blob_amp", "blob_width"},
}


@dataclass(frozen=True)
class PlanetSection:
    radius: float = 6.37122e6
    gravity: float = 9.80616
    omega: float = 7.292e-5
    f_plane: float = 0.0        # constant Coriolis for plane meshes


@dataclass(frozen=True)
class TestcaseSection:
    name: str
    depth: float = 1.0e4
    perturbation_form: str = "paper_literal"
    with_perturbation: bool = True
    b0: float = 10.0
    blob_amp: float = 0.1
    blob_width: float = 0.1
    b_constant: float | None = None   # override hb = b_constant * h at init


@dataclass(frozen=True)
class MeshSection:
    kind: str
    p: int
    n: int = 0                  # elements per cube edge (cubed_sphere)
    nx: int = 0
    ny: int = 0
    lx: float = 1.0
    ly: float = 1.0


@dataclass(frozen=True)
class SchemeSection:
    variant: str = "full"
    flux: str = "conservative"
    alpha: float | None = None
    beta_rule: str | None = None
    c_ref: float | None = None


@dataclass(frozen=True)
class TimeSection:
    duration_seconds: float
    cfl: float = 0.8
    fixed_dt: float | None = None


@dataclass(frozen=True)
class OutputSection:
    directory: str | None = None
    diagnostics_every: int = 10
    snapshot_every: int = 0     # 0 disables snapshots
    snapshot_fields: tuple = ("h", "b", "vorticity")


@dataclass(frozen=True)
class RunConfig:
    testcase: TestcaseSection
    mesh: MeshSection
    time: TimeSection
    planet: PlanetSection = field(default_factory=PlanetSection)
    scheme: SchemeSection = field(default_factory=SchemeSection)
    output: OutputSection = field(default_factory=OutputSection)


def _section(data: dict, name: str) -> dict:
    sub = data.get(name, {})
    if sub is None:
        sub = {}
    if not isinstance(sub, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    return dict(sub)


def _reject_leftovers(sub: dict, name: str) -> None:
    if sub:
        key = sorted(sub)[0]
        raise ConfigError(f"unknown key '{name}.{key}'")


def _num(sub: dict, name: str, key: str, default):
    val = sub.pop(key, default)
    if val is None:
        return None
    try:
        return float(val)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}.{key}' must be a number, got {val!r}") from None


def _integer(sub: dict, name: str, key: str, default):
    val = sub.pop(key, default)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"'{name}.{key}' must be an integer, got {val!r}")
    return val


def _choice(sub: dict, name: str, key: str, allowed, default):
    val = sub.pop(key, default)
    if val is not None and val not in allowed:
        raise ConfigError(
            f"'{name}.{key}' must be one of {', '.join(allowed)}; got {val!r}")
    return val


def _boolean(sub: dict, name: str, key: str, default):
    val = sub.pop(key, default)
    if not isinstance(val, bool):
        raise ConfigError(f"'{name}.{key}' must be true or false, got {val!r}")
    return val


def _parse_planet(data: dict) -> PlanetSection:
    sub = _section(data, "planet")
    out = PlanetSection(
        radius=_num(sub, "planet", "radius", PlanetSection.radius),
        gravity=_num(sub, "planet", "gravity", PlanetSection.gravity),
        omega=_num(sub, "planet", "omega", PlanetSection.omega),
        f_plane=_num(sub, "planet", "f_plane", PlanetSection.f_plane),
    )
    _reject_leftovers(sub, "planet")
    for key in ("radius", "gravity"):
        if getattr(out, key) <= 0:
            raise ConfigError(f"'planet.{key}' must be positive")
    if out.omega < 0:
        raise ConfigError("'planet.omega' must be >= 0")
    return out


def _parse_testcase(data: dict) -> TestcaseSection:
    sub = _section(data, "testcase")
    name = _choice(sub, "testcase", "name", TESTCASE_NAMES, None)
    if name is None:
        raise ConfigError("missing required key 'testcase.name'")
    allowed = _CASE_KEYS[name]
    for key in list(sub):
        if key != "b_constant" and key not in allowed:
            raise ConfigError(f"key 'testcase.{key}' not valid for testcase '{name}'")
    b_const = sub.pop("b_constant", None)
    if b_const is True:
        b_const = -1.0          # sentinel: resolve to planet.gravity at build
    elif b_const is not None:
        try:
            b_const = float(b_const)
        except (TypeError, ValueError):
            raise ConfigError(
                f"'testcase.b_constant' must be a number or true, got {b_const!r}") from None
        if b_const <= 0:
            raise ConfigError("'testcase.b_constant' must be positive")
    out = TestcaseSection(
        name=name,
        depth=_num(sub, "testcase", "depth", TestcaseSection.depth),
        perturbation_form=_choice(sub, "testcase", "perturbation_form",
                                  PERTURBATION_FORMS,
                                  TestcaseSection.perturbation_form),
        with_perturbation=_boolean(sub, "testcase", "with_perturbation", True),
        b0=_num(sub, "testcase", "b0", TestcaseSection.b0),
        blob_amp=_num(sub, "testcase", "blob_amp", TestcaseSection.blob_amp),
        blob_width=_num(sub, "testcase", "blob_width", TestcaseSection.blob_width),
        b_constant=b_const,
    )
    _reject_leftovers(sub, "testcase")
    if out.depth <= 0:
        raise ConfigError("'testcase.depth' must be positive")
    return out


def _parse_mesh(data: dict) -> MeshSection:
    sub = _section(data, "mesh")
    kind = _choice(sub, "mesh", "kind", MESH_KINDS, None)
    if kind is None:
        raise ConfigError("missing required key 'mesh.kind'")
    p = _integer(sub, "mesh", "p", None)
    if p is None:
        raise ConfigError("missing required key 'mesh.p'")
    if p < 1:
        raise ConfigError("'mesh.p' must be >= 1")
    if kind == "cubed_sphere":
        for key in ("nx", "ny", "lx", "ly"):
            if key in sub:
                raise ConfigError(f"key 'mesh.{key}' not valid for kind 'cubed_sphere'")
        n = _integer(sub, "mesh", "n", None)
        if n is None:
            raise ConfigError("missing required key 'mesh.n'")
        if n < 1:
            raise ConfigError("'mesh.n' must be >= 1")
        out = MeshSection(kind=kind, p=p, n=n)
    else:
        if "n" in sub:
            raise ConfigError("key 'mesh.n' not valid for kind 'periodic_plane'")
        nx = _integer(sub, "mesh", "nx", None)
        ny = _integer(sub, "mesh", "ny", None)
        if nx is None or ny is None:
            raise ConfigError("periodic_plane mesh requires 'mesh.nx' and 'mesh.ny'")
        # the face pairing needs at least 3 elements per periodic direction
        # so an element never couples to itself
        if nx < 3 or ny < 3:
            raise ConfigError("'mesh.nx' and 'mesh.ny' must be >= 3")
        lx = _num(sub, "mesh", "lx", 1.0)
        ly = _num(sub, "mesh", "ly", 1.0)
        if lx <= 0 or ly <= 0:
            raise ConfigError("'mesh.lx' and 'mesh.ly' must be positive")
        out = MeshSection(kind=kind, p=p, nx=nx, ny=ny, lx=lx, ly=ly)
    _reject_leftovers(sub, "mesh")
    return out


def _parse_scheme(data: dict) -> SchemeSection:
    sub = _section(data, "scheme")
    out = SchemeSection(
        variant=_choice(sub, "scheme", "variant", SCHEME_VARIANTS, "full"),
        flux=_choice(sub, "scheme", "flux", FLUX_MODES, "conservative"),
        alpha=_num(sub, "scheme", "alpha", None),
        beta_rule=_choice(sub, "scheme", "beta_rule", BETA_RULES, None),
        c_ref=_num(sub, "scheme", "c_ref", None),
    )
    _reject_leftovers(sub, "scheme")
    if out.flux == "custom":
        if out.alpha is None or out.beta_rule is None:
            raise ConfigError(
                "'scheme.flux: custom' requires 'scheme.alpha' and 'scheme.beta_rule'")
        if out.alpha < 0:
            raise ConfigError("'scheme.alpha' must be >= 0")
    elif out.alpha is not None or out.beta_rule is not None:
        raise ConfigError(
            "'scheme.alpha'/'scheme.beta_rule' are only valid with 'scheme.flux: custom'")
    return out


def _parse_time(data: dict) -> TimeSection:
    sub = _section(data, "time")
    days = _num(sub, "time", "duration_days", None)
    seconds = _num(sub, "time", "duration_seconds", None)
    if (days is None) == (seconds is None):
        raise ConfigError(
            "exactly one of 'time.duration_days' or 'time.duration_seconds' is required")
    duration = days * 86400.0 if days is not None else seconds
    out = TimeSection(
        duration_seconds=duration,
        cfl=_num(sub, "time", "cfl", TimeSection.cfl),
        fixed_dt=_num(sub, "time", "fixed_dt", None),
    )
    _reject_leftovers(sub, "time")
    if out.duration_seconds < 0:
        raise ConfigError("run duration must be >= 0")
    if out.cfl <= 0:
        raise ConfigError("'time.cfl' must be positive")
    if out.fixed_dt is not None and out.fixed_dt <= 0:
        raise ConfigError("'time.fixed_dt' must be positive")
    return out


def _parse_output(data: dict) -> OutputSection:
    sub = _section(data, "output")
    fields = sub.pop("snapshot_fields", list(OutputSection.snapshot_fields))
    if not isinstance(fields, (list, tuple)):
        raise ConfigError("'output.snapshot_fields' must be a list")
    for f in fields:
        if f not in SNAPSHOT_FIELDS:
            raise ConfigError(
                f"unknown snapshot field {f!r}; valid: {', '.join(SNAPSHOT_FIELDS)}")
    directory = sub.pop("directory", None)
    if directory is not None and not isinstance(directory, str):
        raise ConfigError("'output.directory' must be a string path")
    out = OutputSection(
        directory=directory,
        diagnostics_every=_integer(sub, "output", "diagnostics_every",
                                   OutputSection.diagnostics_every),
        snapshot_every=_integer(sub, "output", "snapshot_every",
                                OutputSection.snapshot_every),
        snapshot_fields=tuple(fields),
    )
    _reject_leftovers(sub, "output")
    if out.diagnostics_every < 1:
        raise ConfigError("'output.diagnostics_every' must be >= 1")
    if out.snapshot_every < 0:
        raise ConfigError("'output.snapshot_every' must be >= 0")
    return out


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping of sections")
    data = dict(data)
    cfg = RunConfig(
        testcase=_parse_testcase(data),
        mesh=_parse_mesh(data),
        time=_parse_time(data),
        planet=_parse_planet(data),
        scheme=_parse_scheme(data),
        output=_parse_output(data),
    )
    for name in ("testcase", "mesh", "time", "planet", "scheme", "output"):
        data.pop(name, None)
    if data:
        raise ConfigError(f"unknown config section '{sorted(data)[0]}'")

    sphere_only = ("rest", "steady_zonal", "galewsky")
    if cfg.testcase.name in sphere_only and cfg.mesh.kind != "cubed_sphere":
        raise ConfigError(
            f"testcase '{cfg.testcase.name}' requires 'mesh.kind: cubed_sphere'")
    if cfg.testcase.name == "plane_blob" and cfg.mesh.kind != "periodic_plane":
        raise ConfigError("testcase 'plane_blob' requires 'mesh.kind: periodic_plane'")
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
    if data is None:
        raise ConfigError(f"empty config file {path}")
    return parse_config(data)
