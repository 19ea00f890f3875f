"""Figure builders: field patterns, drift curves, convergence tables."""
import numpy as np
import pytest

from trswplot import (ElementLocator, SnapshotError, plot_convergence,
                      plot_diagnostics, plot_field, raster_latlon,
                      read_snapshot)
from trswplot.figures import DRIFT_FLOOR, DRIFT_SERIES

from conftest import first_snapshot

OMEGA = 7.292e-5


@pytest.fixture(autouse=True)
def _close_figures():
    yield
    import matplotlib.pyplot as plt
    plt.close("all")


def test_rest_vorticity_renders_coriolis_pattern(rest_run):
    """At rest the absolute vorticity raster is the analytic f map."""
    snap = read_snapshot(first_snapshot(rest_run))
    vals, _ = raster_latlon(snap, "vorticity")
    lat = np.linspace(-np.pi / 2, np.pi / 2, vals.shape[0])
    f = 2.0 * OMEGA * np.sin(lat)[:, None]
    scale = 2.0 * OMEGA
    # n=2, p=3 interpolation of sin(lat); measured 4.3e-4 of 2*Omega
    assert np.abs(vals - f).max() < 2e-3 * scale
    # the pattern is zonal: rows are constant up to the same error
    assert np.ptp(vals, axis=1).max() < 2e-3 * scale


def test_jet_relative_vorticity_band_visible(jet_run):
    snap = read_snapshot(first_snapshot(jet_run))
    loc = ElementLocator(snap)
    vort, _ = raster_latlon(snap, "vorticity", locator=loc)
    cor, _ = raster_latlon(snap, "coriolis", locator=loc)
    rel = np.abs(vort - cor).mean(axis=1)
    lat = np.linspace(-90.0, 90.0, rel.size)
    assert 20.0 < lat[rel.argmax()] < 70.0
    assert rel[lat < -15.0].max() < 0.05 * rel[lat > 15.0].max()


def test_plot_field_prints_nodal_extremes(rest_run, tmp_path, capsys):
    snap = read_snapshot(first_snapshot(rest_run))
    fig = plot_field(snap, "h")
    line = capsys.readouterr().out.strip()
    assert line.startswith("h: min=")
    lo, hi = (part.split("=")[1] for part in line.split(": ")[1].split(" "))
    assert lo == hi  # constant resting depth
    out = tmp_path / "h.png"
    fig.savefig(out)
    assert out.stat().st_size > 0


def test_plot_field_projections(jet_run, tmp_path):
    snap = read_snapshot(first_snapshot(jet_run))
    for projection in ("latlon", "north", "south"):
        fig = plot_field(snap, "vorticity", projection=projection, samples=1)
        out = tmp_path / f"{projection}.png"
        fig.savefig(out)
        assert out.stat().st_size > 0


def test_plot_field_rejects_unknown_inputs(rest_run):
    snap = read_snapshot(first_snapshot(rest_run))
    with pytest.raises(SnapshotError, match="enstrophy"):
        plot_field(snap, "enstrophy")
    with pytest.raises(ValueError, match="projection"):
        plot_field(snap, "h", projection="mercator")


def test_plot_diagnostics_renders_every_drift_series(drift_run, tmp_path):
    fig = plot_diagnostics(drift_run / "diagnostics.csv")
    lines = {l.get_label(): l for l in fig.axes[0].get_lines()}
    assert set(lines) == set(DRIFT_SERIES)
    for line in lines.values():
        y = line.get_ydata()
        assert len(y) >= 2
        assert np.isfinite(y).all() and (np.asarray(y) >= DRIFT_FLOOR).all()
    out = tmp_path / "drift.png"
    fig.savefig(out)
    assert out.stat().st_size > 0


def test_plot_diagnostics_clips_exact_zeros(tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text(
        "step,t_seconds,M,S,E,Z,W,relM,relS,relE,relZ,relW,dt\n"
        "0,0.0,1,1,1,1,1,0.0,0.0,0.0,0.0,0.0,0.0\n"
        "1,60.0,1,1,1,1,1,0.0,1e-15,-2e-12,0.0,0.0,60.0\n")
    fig = plot_diagnostics(csv)
    for line in fig.axes[0].get_lines():
        assert (np.asarray(line.get_ydata()) >= DRIFT_FLOOR).all()


def test_plot_diagnostics_names_missing_columns(tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text("step,t_seconds,relM,relS,relE\n0,0.0,0,0,0\n")
    with pytest.raises(ValueError, match="relZ"):
        plot_diagnostics(csv)
    csv.write_text("step,t_seconds,relM,relS,relE,relZ\n")
    with pytest.raises(ValueError, match="no data"):
        plot_diagnostics(csv)


def _write_convergence_table(path, order=3.1):
    with open(path, "w") as fh:
        fh.write("mode,n,dx,err_h,err_hb,err_u\n")
        for mode, c in (("conservative", 2.0), ("dissipative", 0.5)):
            for n in (4, 8, 16):
                dx = 4.0e5 / n
                fh.write(f"{mode},{n},{dx},{c * dx ** order:.8e},0,0\n")
        fh.write("slope_conservative,,,3.1,,\n")  # refitted, must be ignored


def test_plot_convergence_fits_and_annotates(tmp_path):
    table = tmp_path / "conv.csv"
    _write_convergence_table(table)
    fig = plot_convergence(table)
    labels = [l.get_label() for l in fig.axes[0].get_lines()]
    assert sorted(labels) == ["conservative: fitted order 3.10",
                              "dissipative: fitted order 3.10"]
    out = tmp_path / "conv.png"
    fig.savefig(out)
    assert out.stat().st_size > 0


def test_plot_convergence_rejects_bad_tables(tmp_path):
    table = tmp_path / "conv.csv"
    table.write_text("")
    with pytest.raises(ValueError, match="empty"):
        plot_convergence(table)
    table.write_text("a,b,c\n")
    with pytest.raises(ValueError, match="mode"):
        plot_convergence(table)
    table.write_text("mode,n,dx,err_h\nconservative,4,1.0e5,1e-3\n")
    with pytest.raises(ValueError, match="two resolutions"):
        plot_convergence(table)
