import numpy as np
import pytest

from gravfig.io import (
    HEADERS,
    mesh_geometry,
    read_config,
    read_data,
    read_log,
    read_model,
    read_spectrum,
    read_upre,
)


def test_model_roundtrip(tmp_path):
    path = tmp_path / "model.csv"
    rows = [
        "0,0,0,25,25,25,0.5",
        "1,0,0,75,25,25,0",
        "0,1,0,25,75,25,1",
    ]
    path.write_text(HEADERS["model"] + "\n" + "\n".join(rows) + "\n")
    ijk, xyz, rho = read_model(path)
    assert ijk.dtype.kind == "i"
    assert ijk.tolist() == [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    assert np.allclose(xyz[1], [75, 25, 25])
    assert rho.tolist() == [0.5, 0.0, 1.0]


def test_header_contract_enforced(tmp_path):
    path = tmp_path / "model.csv"
    path.write_text("i,j,k,x,y,z,rho\n0,0,0,1,1,1,0\n")
    with pytest.raises(ValueError, match="expected header"):
        read_model(path)


def test_column_count_enforced(tmp_path):
    path = tmp_path / "spectrum.csv"
    path.write_text(HEADERS["spectrum"] + "\n1,2,3\n")
    with pytest.raises(ValueError, match="columns"):
        read_spectrum(path)


def test_empty_body_gives_zero_rows(tmp_path):
    path = tmp_path / "upre_k.csv"
    path.write_text(HEADERS["upre"] + "\n")
    alpha, risk = read_upre(path)
    assert alpha.size == 0 and risk.size == 0


def test_log_columns_and_nan(tmp_path):
    path = tmp_path / "log.csv"
    path.write_text(HEADERS["log"] + "\n1,100.0,5000,nan,0.2\n2,10.0,600,nan,0.3\n")
    cols = read_log(path)
    assert cols["iter"].tolist() == [1.0, 2.0]
    assert np.all(np.isnan(cols["re"]))
    assert cols["alpha"].tolist() == [100.0, 10.0]


def test_data_reader(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text(HEADERS["data"] + "\n25,25,0,1.25,0.05\n75,25,0,-0.5,0.04\n")
    coords, gz, std = read_data(path)
    assert coords.shape == (2, 3)
    assert gz.tolist() == [1.25, -0.5]
    assert std.tolist() == [0.05, 0.04]


def test_config_types_and_comments(tmp_path):
    path = tmp_path / "config.txt"
    path.write_text(
        "# a run\ncase = two-cube\nnx = 4\ndx = 50.0\nreweight_ref = apriori\n\n"
        "rho_max = 1 # inline note\n"
    )
    cfg = read_config(path)
    assert cfg["case"] == "two-cube"
    assert cfg["nx"] == 4 and isinstance(cfg["nx"], int)
    assert cfg["dx"] == 50.0
    assert cfg["reweight_ref"] == "apriori"
    assert cfg["rho_max"] == 1


def test_config_parse_error(tmp_path):
    path = tmp_path / "config.txt"
    path.write_text("nx 4\n")
    with pytest.raises(ValueError, match="cannot parse"):
        read_config(path)


def test_mesh_geometry():
    cfg = dict(nx=4, ny=3, nz=2, dx=50.0, dy=50.0, dz=25.0, origin_z=10.0)
    dims, cell, origin = mesh_geometry(cfg)
    assert dims == (4, 3, 2)
    assert cell == (50.0, 50.0, 25.0)
    assert origin == (0.0, 0.0, 10.0)
    with pytest.raises(ValueError, match="missing mesh keys"):
        mesh_geometry({"nx": 4})
    bad = dict(cfg, nz=0)
    with pytest.raises(ValueError, match="positive"):
        mesh_geometry(bad)
