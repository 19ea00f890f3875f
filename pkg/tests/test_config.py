"""Config parsing: strict keys, defaults, cross-section validation."""
import pytest

from trsw.config import ConfigError, load_config, parse_config


def sphere_dict(**over):
    data = {
        "testcase": {"name": "steady_zonal"},
        "mesh": {"kind": "cubed_sphere", "n": 4, "p": 3},
        "time": {"duration_days": 1},
    }
    data.update(over)
    return data


def plane_dict(**over):
    data = {
        "testcase": {"name": "plane_blob"},
        "mesh": {"kind": "periodic_plane", "nx": 4, "ny": 3, "p": 3,
                 "lx": 2.0, "ly": 1.0},
        "time": {"duration_seconds": 10.0},
    }
    data.update(over)
    return data


def test_minimal_sphere_defaults():
    cfg = parse_config(sphere_dict())
    assert cfg.mesh.kind == "cubed_sphere" and cfg.mesh.n == 4
    assert cfg.time.duration_seconds == 86400.0
    assert cfg.time.cfl == 0.8 and cfg.time.fixed_dt is None
    assert cfg.scheme.variant == "full" and cfg.scheme.flux == "conservative"
    assert cfg.planet.radius == 6.37122e6
    assert cfg.planet.gravity == 9.80616
    assert cfg.planet.omega == 7.292e-5
    assert cfg.output.diagnostics_every == 10
    assert cfg.output.snapshot_every == 0


def test_unknown_key_names_dotted_path():
    data = sphere_dict()
    data["output"] = {"snapsot_every": 5}
    with pytest.raises(ConfigError, match="output.snapsot_every"):
        parse_config(data)
    data = sphere_dict()
    data["mesh"]["nn"] = 4
    with pytest.raises(ConfigError, match="mesh.nn"):
        parse_config(data)


def test_unknown_root_section():
    data = sphere_dict(timestep={"cfl": 0.5})
    with pytest.raises(ConfigError, match="unknown config section 'timestep'"):
        parse_config(data)


def test_missing_required_keys():
    data = sphere_dict()
    del data["testcase"]["name"]
    with pytest.raises(ConfigError, match="testcase.name"):
        parse_config(data)
    data = sphere_dict()
    del data["mesh"]["p"]
    with pytest.raises(ConfigError, match="mesh.p"):
        parse_config(data)
    data = sphere_dict()
    del data["mesh"]["n"]
    with pytest.raises(ConfigError, match="mesh.n"):
        parse_config(data)


def test_duration_exactly_one_spelling():
    data = sphere_dict()
    data["time"] = {"duration_days": 1, "duration_seconds": 5.0}
    with pytest.raises(ConfigError):
        parse_config(data)
    data["time"] = {}
    with pytest.raises(ConfigError):
        parse_config(data)
    data["time"] = {"duration_seconds": 3600}
    assert parse_config(data).time.duration_seconds == 3600.0


def test_mesh_kind_cross_keys():
    data = sphere_dict()
    data["mesh"]["nx"] = 4
    with pytest.raises(ConfigError, match="mesh.nx"):
        parse_config(data)
    data = plane_dict()
    data["mesh"]["n"] = 4
    with pytest.raises(ConfigError, match="mesh.n"):
        parse_config(data)


def test_plane_needs_three_elements_per_axis():
    # nx=2 would make an element its own periodic neighbor
    data = plane_dict()
    data["mesh"]["nx"] = 2
    with pytest.raises(ConfigError):
        parse_config(data)


def test_sphere_testcase_on_plane_rejected():
    data = plane_dict()
    data["testcase"] = {"name": "galewsky"}
    with pytest.raises(ConfigError, match="cubed_sphere"):
        parse_config(data)
    data = sphere_dict()
    data["testcase"] = {"name": "plane_blob"}
    with pytest.raises(ConfigError, match="periodic_plane"):
        parse_config(data)


def test_testcase_option_scoping():
    data = sphere_dict()
    data["testcase"] = {"name": "galewsky", "blob_amp": 0.2}
    with pytest.raises(ConfigError, match="blob_amp"):
        parse_config(data)
    data["testcase"] = {"name": "galewsky", "perturbation_form": "classic_squared"}
    assert parse_config(data).testcase.perturbation_form == "classic_squared"
    data["testcase"] = {"name": "galewsky", "perturbation_form": "cubed"}
    with pytest.raises(ConfigError):
        parse_config(data)


def test_custom_flux_requires_alpha_and_beta():
    data = sphere_dict()
    data["scheme"] = {"flux": "custom", "alpha": 0.5}
    with pytest.raises(ConfigError):
        parse_config(data)
    data["scheme"] = {"flux": "custom", "alpha": 0.5, "beta_rule": "zero"}
    cfg = parse_config(data)
    assert cfg.scheme.alpha == 0.5 and cfg.scheme.beta_rule == "zero"
    data["scheme"] = {"flux": "conservative", "alpha": 0.5}
    with pytest.raises(ConfigError):
        parse_config(data)


def test_b_constant_values():
    data = sphere_dict()
    data["testcase"] = {"name": "galewsky", "b_constant": True}
    assert parse_config(data).testcase.b_constant == -1.0  # resolved to g at build
    data["testcase"] = {"name": "galewsky", "b_constant": 2.5}
    assert parse_config(data).testcase.b_constant == 2.5
    data["testcase"] = {"name": "galewsky", "b_constant": -3.0}
    with pytest.raises(ConfigError):
        parse_config(data)


def test_type_errors():
    data = sphere_dict()
    data["mesh"]["p"] = 3.5
    with pytest.raises(ConfigError, match="integer"):
        parse_config(data)
    data = sphere_dict()
    data["time"]["cfl"] = "fast"
    with pytest.raises(ConfigError, match="number"):
        parse_config(data)
    data = sphere_dict()
    data["testcase"] = {"name": "galewsky", "with_perturbation": "yes"}
    with pytest.raises(ConfigError, match="true or false"):
        parse_config(data)


def test_snapshot_fields_validated():
    data = sphere_dict()
    data["output"] = {"snapshot_fields": ["h", "enstrophy"]}
    with pytest.raises(ConfigError, match="enstrophy"):
        parse_config(data)
    data["output"] = {"snapshot_fields": ["h", "b", "vorticity"]}
    cfg = parse_config(data)
    assert cfg.output.snapshot_fields == ("h", "b", "vorticity")


def test_load_config_yaml(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "testcase:\n  name: steady_zonal\n"
        "mesh:\n  kind: cubed_sphere\n  n: 4\n  p: 3\n"
        "time:\n  duration_days: 0.5\n  cfl: 0.25\n"
        "output:\n  diagnostics_every: 5\n")
    cfg = load_config(path)
    assert cfg.time.duration_seconds == 43200.0
    assert cfg.time.cfl == 0.25
    assert cfg.output.diagnostics_every == 5

    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    with pytest.raises(ConfigError, match="empty"):
        load_config(empty)

    bad = tmp_path / "bad.yaml"
    bad.write_text("mesh: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(bad)
