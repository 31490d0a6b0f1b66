import numpy as np
import pytest
from hypothesis import given, strategies as st

from gravinv.mesh import Mesh, StationSet, build_mesh, depth_weighting, surface_stations


def test_build_mesh_cell_counts():
    mesh = build_mesh((1500.0, 1000.0, 300.0), 50.0)
    assert (mesh.nx, mesh.ny, mesh.nz) == (30, 20, 6)
    assert mesh.n == 3600


def test_build_mesh_multibody_dimensions():
    mesh = build_mesh((5000.0, 2750.0, 600.0), 50.0)
    assert (mesh.nx, mesh.ny, mesh.nz) == (100, 55, 12)
    assert mesh.n == 66000


def test_build_mesh_single_cell_identity():
    mesh = build_mesh((7.0, 3.0, 2.0), (7.0, 3.0, 2.0))
    assert mesh.n == 1
    assert mesh.flat_index(0, 0, 0) == 0
    assert mesh.grid_index(0) == (0, 0, 0)


def test_build_mesh_rejects_non_divisible_extent():
    with pytest.raises(ValueError, match="remainder"):
        build_mesh((120.0, 100.0, 100.0), 50.0)


def test_mesh_invariants():
    with pytest.raises(ValueError):
        Mesh(0, 1, 1, 50.0, 50.0, 50.0)
    with pytest.raises(ValueError):
        Mesh(1, 1, 1, 50.0, -50.0, 50.0)
    with pytest.raises(ValueError):
        # top above the observation plane
        Mesh(1, 1, 1, 50.0, 50.0, 50.0, origin=(0.0, 0.0, -10.0))


def test_index_bijection_depth_fastest():
    mesh = build_mesh((200.0, 150.0, 100.0), 50.0)  # 4 x 3 x 2
    # k (depth) runs fastest
    assert mesh.flat_index(0, 0, 0) == 0
    assert mesh.flat_index(0, 0, 1) == 1
    assert mesh.flat_index(0, 1, 0) == 2
    assert mesh.flat_index(1, 0, 0) == 6
    seen = set()
    for ix in range(mesh.nx):
        for iy in range(mesh.ny):
            for iz in range(mesh.nz):
                flat = mesh.flat_index(ix, iy, iz)
                assert mesh.grid_index(flat) == (ix, iy, iz)
                seen.add(flat)
    assert seen == set(range(mesh.n))


def test_cell_centers_and_bounds():
    mesh = build_mesh((100.0, 50.0, 100.0), 50.0, origin=(10.0, 20.0, 30.0))
    centers = mesh.cell_centers()
    assert centers.shape == (mesh.n, 3)
    assert np.allclose(centers[0], [35.0, 45.0, 55.0])
    x1, x2, y1, y2, z1, z2 = mesh.cell_bounds()
    assert np.all(x2 - x1 == mesh.dx)
    assert np.all(z1 >= 30.0)
    # bounds bracket the centers
    assert np.all((x1 < centers[:, 0]) & (centers[:, 0] < x2))
    assert np.all((z1 < centers[:, 2]) & (centers[:, 2] < z2))


def test_station_set_validation():
    with pytest.raises(ValueError):
        StationSet(np.empty((0, 3)))
    with pytest.raises(ValueError):
        StationSet(np.array([[0.0, 1.0]]))
    with pytest.raises(ValueError):
        StationSet(np.array([[0.0, 1.0, np.nan]]))
    s = StationSet(np.array([[1.0, 2.0, 0.0], [3.0, 4.0, 0.0]]))
    assert s.m == 2
    assert np.all(s.z == 0.0)


def test_surface_stations_grid():
    mesh = build_mesh((1500.0, 1000.0, 500.0), 50.0)
    st = surface_stations(mesh)
    assert st.m == 600
    assert np.all(st.z == 0.0)
    # stations sit over cell centers, never over cell edges
    assert st.x.min() == 25.0 and st.x.max() == 1475.0
    assert st.y.min() == 25.0 and st.y.max() == 975.0


def test_surface_stations_rejects_plane_below_mesh_top():
    mesh = build_mesh((100.0, 100.0, 100.0), 50.0, origin=(0.0, 0.0, 10.0))
    with pytest.raises(ValueError):
        surface_stations(mesh, z=20.0)
    # at or above the top is fine
    surface_stations(mesh, z=10.0)
    surface_stations(mesh, z=-5.0)


def test_depth_weighting_equal_depth_equal_entries():
    mesh = build_mesh((200.0, 200.0, 50.0), 50.0)  # single layer
    w = depth_weighting(mesh)
    assert np.all(w == w[0])


def test_depth_weighting_ratio():
    mesh = build_mesh((100.0, 100.0, 300.0), 50.0)
    w = depth_weighting(mesh, beta=0.8, z0=0.0)
    # centers at 75 m (iz=1) and 275 m (iz=5)
    j1 = mesh.flat_index(0, 0, 1)
    j5 = mesh.flat_index(0, 0, 5)
    assert w[j1] / w[j5] == pytest.approx((275.0 / 75.0) ** 0.8, rel=1e-12)


def test_depth_weighting_default_z0_is_half_cell():
    mesh = build_mesh((100.0, 100.0, 100.0), 50.0)
    w_default = depth_weighting(mesh, beta=0.8)
    w_explicit = depth_weighting(mesh, beta=0.8, z0=25.0)
    assert np.array_equal(w_default, w_explicit)


def test_depth_weighting_rejects_bad_beta():
    mesh = build_mesh((100.0, 100.0, 100.0), 50.0)
    with pytest.raises(ValueError):
        depth_weighting(mesh, beta=0.0)
    with pytest.raises(ValueError):
        depth_weighting(mesh, beta=0.8, z0=-1.0)


@given(
    beta=st.floats(0.1, 3.0),
    z0=st.floats(0.0, 100.0),
    nz=st.integers(2, 8),
)
def test_depth_weighting_monotone_in_depth(beta, z0, nz):
    mesh = build_mesh((100.0, 100.0, nz * 50.0), 50.0)
    w = depth_weighting(mesh, beta=beta, z0=z0)
    assert np.all(w > 0)
    column = [w[mesh.flat_index(0, 0, iz)] for iz in range(nz)]
    assert all(a > b for a, b in zip(column, column[1:]))
