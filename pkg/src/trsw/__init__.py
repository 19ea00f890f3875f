"""Split-form DG spectral element solver for thermal shallow water flows.

Submodules are imported explicitly (trsw.mesh, trsw.solver, ...); nothing
heavy is pulled in at package import time so CLI thread pinning can happen
before numpy loads.
"""

__version__ = "0.1.0"
