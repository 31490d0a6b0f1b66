import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gravinv.forward import assemble_kernel
from gravinv.mesh import Mesh, surface_stations
from gravinv.synthetics import make_two_cube_model


@pytest.fixture(scope="session")
def two_cube():
    """Assembled two-cube system shared across test modules: 600 stations
    over a 30 x 20 x 10 grid of 50 m cells, unit-contrast cubes."""
    mesh = Mesh(nx=30, ny=20, nz=10, dx=50.0, dy=50.0, dz=50.0)
    rho = make_two_cube_model(mesh)
    stations = surface_stations(mesh, z=0.0)
    G = assemble_kernel(mesh, stations)
    return SimpleNamespace(
        mesh=mesh, rho=rho, stations=stations, G=G, d_exact=G @ rho
    )
