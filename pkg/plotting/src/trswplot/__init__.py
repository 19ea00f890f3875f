"""Plotting companion for the shallow water solver's output files."""

from .snapshot import (KIND_PLANE, KIND_SPHERE, Snapshot, SnapshotError,
                       read_snapshot, write_snapshot)
from .interp import gll_nodes, lagrange_rows
from .raster import (ElementLocator, direction, panel_angles, raster_latlon,
                     raster_ortho, raster_plane)
from .figures import (plot_convergence, plot_diagnostics, plot_field,
                      read_convergence, read_diagnostics)

__version__ = "0.1.0"

__all__ = [
    "KIND_PLANE", "KIND_SPHERE", "Snapshot", "SnapshotError",
    "read_snapshot", "write_snapshot", "gll_nodes", "lagrange_rows",
    "ElementLocator", "direction", "panel_angles", "raster_latlon",
    "raster_ortho", "raster_plane", "plot_convergence", "plot_diagnostics",
    "plot_field", "read_convergence", "read_diagnostics", "__version__",
]
