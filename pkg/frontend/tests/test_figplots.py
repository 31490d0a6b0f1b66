import hashlib

import numpy as np
import pytest

from gravfig.io import HEADERS
from gravfig.plots import (
    PlotJob,
    plot_convergence,
    plot_map,
    plot_section,
    plot_spectrum,
    plot_upre,
    run_job,
)


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_mesh_case(tmp_path, nx=4, ny=3, nz=2, rho=None, shuffle=False):
    """A complete tiny run directory: config plus a full model grid."""
    config = tmp_path / "config.txt"
    config.write_text(
        f"nx = {nx}\nny = {ny}\nnz = {nz}\n"
        "dx = 50.0\ndy = 50.0\ndz = 25.0\nrho_min = 0.0\nrho_max = 1.0\n"
    )
    rows = []
    cells = [(i, j, k) for i in range(nx) for j in range(ny) for k in range(nz)]
    for i, j, k in cells:
        val = 0.0 if rho is None else rho(i, j, k)
        rows.append(f"{i},{j},{k},{25 + 50 * i},{25 + 50 * j},{12.5 + 25 * k},{val}")
    if shuffle:
        rows = rows[::-1]
    model = tmp_path / "model.csv"
    model.write_text(HEADERS["model"] + "\n" + "\n".join(rows) + "\n")
    return config, model


# ------------------------------------------------------------------- section


def test_section_renders_and_is_byte_stable(tmp_path):
    config, model = write_mesh_case(
        tmp_path, rho=lambda i, j, k: float(i == 1 and k == 0), shuffle=True
    )
    a = plot_section(model, config, "y", 75.0, tmp_path / "a.png")
    b = plot_section(model, config, "y", 75.0, tmp_path / "b.png")
    assert a.stat().st_size > 0
    assert sha(a) == sha(b)


def test_section_all_axes(tmp_path):
    config, model = write_mesh_case(tmp_path, rho=lambda i, j, k: i + j + k)
    for axis, value in (("x", 60.0), ("y", 10.0), ("z", 30.0)):
        out = plot_section(model, config, axis, value, tmp_path / f"{axis}.png")
        assert out.exists()


def test_section_empty_model_renders(tmp_path):
    config, model = write_mesh_case(tmp_path)  # all-zero contrasts
    out = plot_section(model, config, "y", 75.0, tmp_path / "zero.png")
    assert out.stat().st_size > 0


def test_section_slice_validation(tmp_path):
    config, model = write_mesh_case(tmp_path)
    with pytest.raises(ValueError, match="outside mesh extent"):
        plot_section(model, config, "y", 150.1, tmp_path / "x.png")
    with pytest.raises(ValueError, match="outside mesh extent"):
        plot_section(model, config, "z", -1.0, tmp_path / "x.png")
    # the far boundary belongs to the last cell
    assert plot_section(model, config, "y", 150.0, tmp_path / "edge.png").exists()
    with pytest.raises(ValueError, match="axis"):
        plot_section(model, config, "depth", 10.0, tmp_path / "x.png")


def test_section_rejects_incomplete_grid(tmp_path):
    config, model = write_mesh_case(tmp_path)
    lines = model.read_text().splitlines()
    model.write_text("\n".join(lines[:-3]) + "\n")
    with pytest.raises(ValueError, match="cells"):
        plot_section(model, config, "y", 75.0, tmp_path / "x.png")


# ----------------------------------------------------------------------- map


def write_data_grid(tmp_path, nx=5, ny=4):
    rows = [
        f"{25 + 50 * i},{25 + 50 * j},0.0,{np.sin(i + 2 * j):.6f},0.05"
        for i in range(nx)
        for j in range(ny)
    ]
    path = tmp_path / "data.csv"
    path.write_text(HEADERS["data"] + "\n" + "\n".join(rows) + "\n")
    return path


def test_map_gridded_and_scatter(tmp_path):
    data = write_data_grid(tmp_path)
    out = plot_map(data, tmp_path / "map.png")
    assert out.stat().st_size > 0
    # drop one row: no longer a complete grid, falls back to scatter
    lines = data.read_text().splitlines()
    data.write_text("\n".join(lines[:-1]) + "\n")
    assert plot_map(data, tmp_path / "scatter.png").exists()


def test_map_std_column_and_validation(tmp_path):
    data = write_data_grid(tmp_path)
    assert plot_map(data, tmp_path / "std.png", column="std").exists()
    with pytest.raises(ValueError, match="column"):
        plot_map(data, tmp_path / "x.png", column="chi2")
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADERS["data"] + "\n")
    with pytest.raises(ValueError, match="no data rows"):
        plot_map(empty, tmp_path / "x.png")


# --------------------------------------------------------------- convergence


def write_log(tmp_path, re_values):
    rows = [
        f"{k + 1},{1000.0 / 10**k},{5000.0 / 4**k},{re},{0.1 * (k + 1)}"
        for k, re in enumerate(re_values)
    ]
    path = tmp_path / "log.csv"
    path.write_text(HEADERS["log"] + "\n" + "\n".join(rows) + "\n")
    return path


def test_convergence_two_panels(tmp_path):
    log = write_log(tmp_path, ["0.8", "0.5", "0.4"])
    written = plot_convergence(log, tmp_path / "figs")
    assert [p.name for p in written] == ["alpha_k.png", "re_k.png"]
    assert all(p.stat().st_size > 0 for p in written)


def test_convergence_skips_re_without_truth(tmp_path, capsys):
    log = write_log(tmp_path, ["nan", "nan"])
    written = plot_convergence(log, tmp_path / "figs")
    assert [p.name for p in written] == ["alpha_k.png"]
    assert "skipping re_k.png" in capsys.readouterr().out


def test_convergence_single_row_and_empty(tmp_path):
    log = write_log(tmp_path, ["0.9"])
    assert len(plot_convergence(log, tmp_path / "one")) == 2
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADERS["log"] + "\n")
    with pytest.raises(ValueError, match="no iterations"):
        plot_convergence(empty, tmp_path / "x")


# ----------------------------------------------------------- upre / spectrum


def test_upre_curve(tmp_path):
    alphas = np.logspace(0, 3, 40)
    risk = (np.log10(alphas) - 1.7) ** 2 + 3.0
    path = tmp_path / "upre_k.csv"
    path.write_text(
        HEADERS["upre"] + "\n"
        + "\n".join(f"{a:.8g},{u:.8g}" for a, u in zip(alphas, risk)) + "\n"
    )
    a = plot_upre(path, tmp_path / "a.png")
    b = plot_upre(path, tmp_path / "b.png")
    assert sha(a) == sha(b)
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADERS["upre"] + "\n")
    with pytest.raises(ValueError, match="empty risk curve"):
        plot_upre(empty, tmp_path / "x.png")


def write_spectrum(tmp_path, name, scale):
    sig = scale * 0.7 ** np.arange(1, 30)
    path = tmp_path / name
    path.write_text(
        HEADERS["spectrum"] + "\n"
        + "\n".join(f"{i + 1},{s:.8g}" for i, s in enumerate(sig)) + "\n"
    )
    return path

def test_spectrum_overlay_and_labels(tmp_path):
    one = write_spectrum(tmp_path, "one.csv", 100.0)
    two = write_spectrum(tmp_path, "two.csv", 80.0)
    out = plot_spectrum([one, two], tmp_path / "s.png", labels=("sketched", "dense"))
    assert out.stat().st_size > 0
    with pytest.raises(ValueError, match="labels"):
        plot_spectrum([one, two], tmp_path / "x.png", labels=("just-one",))
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADERS["spectrum"] + "\n")
    with pytest.raises(ValueError, match="empty spectrum"):
        plot_spectrum([one, empty], tmp_path / "x.png")


# ------------------------------------------------------------------ plumbing


def test_plotjob_validation(tmp_path):
    with pytest.raises(ValueError, match="unknown plot kind"):
        PlotJob(kind="waterfall", inputs=("a.csv",), output=tmp_path / "x.png")
    with pytest.raises(ValueError, match="at least one input"):
        PlotJob(kind="spectrum", inputs=(), output=tmp_path / "x.png")
    with pytest.raises(ValueError, match="config"):
        PlotJob(kind="section", inputs=("m.csv",), output=tmp_path / "x.png")


def test_run_job_dispatch(tmp_path):
    one = write_spectrum(tmp_path, "one.csv", 50.0)
    job = PlotJob(kind="spectrum", inputs=(one,), output=tmp_path / "s.png")
    written = run_job(job)
    assert len(written) == 1 and written[0].exists()


def test_inputs_never_modified(tmp_path):
    config, model = write_mesh_case(tmp_path, rho=lambda i, j, k: i * k)
    before = (sha(model), config.read_text())
    plot_section(model, config, "z", 20.0, tmp_path / "out.png")
    assert (sha(model), config.read_text()) == before
