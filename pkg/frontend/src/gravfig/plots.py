"""Figure builders over the inversion CSV formats.

Every function renders from files to a PNG path and returns the paths it
wrote. Inputs are never modified, the style is fixed, and nothing
time-dependent is embedded, so identical inputs give identical bytes.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    mesh_geometry,
    read_config,
    read_data,
    read_log,
    read_model,
    read_spectrum,
    read_upre,
)
from .style import STYLE

KINDS = ("section", "map", "convergence", "upre", "spectrum")

AXIS_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class PlotJob:
    """One figure request: inputs, kind, slice selector, output path."""

    kind: str
    inputs: tuple
    output: Path
    config: Path | None = None
    axis: str = "y"
    value: float = 0.0
    column: str = "gz"
    labels: tuple = ()
    vmin: float | None = None
    vmax: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")
        if self.kind == "section" and self.config is None:
            raise ValueError("section plots need the run config for the mesh")


def run_job(job: PlotJob) -> tuple:
    if job.kind == "section":
        return (
            plot_section(
                job.inputs[0], job.config, job.axis, job.value, job.output,
                vmin=job.vmin, vmax=job.vmax,
            ),
        )
    if job.kind == "map":
        return (plot_map(job.inputs[0], job.output, column=job.column),)
    if job.kind == "convergence":
        return plot_convergence(job.inputs[0], job.output)
    if job.kind == "upre":
        return (plot_upre(job.inputs[0], job.output),)
    return (plot_spectrum(job.inputs, job.output, labels=job.labels),)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # drop the library-version tag so reruns stay byte-identical
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_section(model_csv, config, axis, value, out, vmin=None, vmax=None) -> Path:
    """Heat-map of density contrast on one mesh plane.

    axis picks the fixed coordinate ("x", "y", or "z"); value is its position
    in meters and must lie inside the mesh extent. Color limits default to
    the run's density bounds so separate runs stay comparable.
    """
    if axis not in AXIS_NAMES:
        raise ValueError(f"axis must be one of {AXIS_NAMES}, got {axis!r}")
    cfg = read_config(config)
    dims, cell, origin = mesh_geometry(cfg)
    ijk, _, rho = read_model(model_csv)
    if ijk.shape[0] != dims[0] * dims[1] * dims[2]:
        raise ValueError(
            f"{model_csv}: {ijk.shape[0]} cells but the config mesh has "
            f"{dims[0] * dims[1] * dims[2]}"
        )

    ax_i = AXIS_NAMES.index(axis)
    lo = origin[ax_i]
    hi = lo + dims[ax_i] * cell[ax_i]
    if not lo <= value <= hi:
        raise ValueError(f"slice {axis}={value:g} m outside mesh extent [{lo:g}, {hi:g}]")
    idx = min(int((value - lo) // cell[ax_i]), dims[ax_i] - 1)

    a, b = (t for t in range(3) if t != ax_i)
    keep = ijk[:, ax_i] == idx
    grid = np.full((dims[a], dims[b]), np.nan)
    grid[ijk[keep, a], ijk[keep, b]] = rho[keep]

    if vmin is None:
        vmin = float(cfg.get("rho_min", np.nanmin(grid)))
    if vmax is None:
        vmax = float(cfg.get("rho_max", np.nanmax(grid)))

    extent = (
        origin[a],
        origin[a] + dims[a] * cell[a],
        origin[b],
        origin[b] + dims[b] * cell[b],
    )
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        im = ax.imshow(
            grid.T,
            origin="lower",
            extent=extent,
            aspect="equal",
            interpolation="nearest",
            vmin=vmin,
            vmax=vmax,
        )
        ax.set_xlabel(f"{AXIS_NAMES[a]} (m)")
        ax.set_ylabel(f"{AXIS_NAMES[b]} (m)")
        if b == 2:
            ax.invert_yaxis()  # depth grows downward on the page
        ax.set_title(f"section at {axis} = {value:g} m")
        fig.colorbar(im, ax=ax, label="density contrast (g/cm$^3$)")
        return _save(fig, out)


def plot_map(data_csv, out, column="gz") -> Path:
    """Plan view of observed values (or their standard deviations)."""
    if column not in ("gz", "std"):
        raise ValueError(f"column must be 'gz' or 'std', got {column!r}")
    coords, gz, std = read_data(data_csv)
    if coords.shape[0] == 0:
        raise ValueError(f"{data_csv}: no data rows")
    vals = gz if column == "gz" else std
    label = "gz (mGal)" if column == "gz" else "std (mGal)"

    xs = np.unique(coords[:, 0])
    ys = np.unique(coords[:, 1])
    gridded = xs.size * ys.size == vals.size
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if gridded:
            grid = np.full((xs.size, ys.size), np.nan)
            gi = np.searchsorted(xs, coords[:, 0])
            gj = np.searchsorted(ys, coords[:, 1])
            grid[gi, gj] = vals
            im = ax.imshow(
                grid.T,
                origin="lower",
                extent=(xs[0], xs[-1], ys[0], ys[-1]),
                aspect="equal",
                interpolation="nearest",
            )
        else:
            im = ax.scatter(coords[:, 0], coords[:, 1], c=vals, s=12)
            ax.set_aspect("equal")
        ax.set_xlabel("x (m)")
        ax.set_ylabel("y (m)")
        ax.set_title("observed field" if column == "gz" else "data standard deviation")
        fig.colorbar(im, ax=ax, label=label)
        return _save(fig, out)


def plot_convergence(log_csv, out_dir) -> tuple:
    """Regularization parameter and model error against iteration.

    Writes alpha_k.png always and re_k.png when the log carries a usable
    error column; a log without one (no exact model supplied to the run)
    skips that panel with a printed notice.
    """
    cols = read_log(log_csv)
    if cols["iter"].size == 0:
        raise ValueError(f"{log_csv}: no iterations logged")
    out_dir = Path(out_dir)
    ks = cols["iter"]
    final = f"ended at k = {int(ks[-1])}, $\\chi^2$ = {cols['chi2'][-1]:.6g}"

    written = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(ks, cols["alpha"], marker="o")
        ax.set_xlabel("iteration")
        ax.set_ylabel(r"$\alpha$")
        ax.set_title(f"regularization parameter ({final})")
        written.append(_save(fig, out_dir / "alpha_k.png"))

    re = cols["re"]
    if np.all(np.isnan(re)):
        print(f"notice: {log_csv} has no relative-error values, skipping re_k.png")
        return tuple(written)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(ks, re, marker="o")
        ax.set_xlabel("iteration")
        ax.set_ylabel("relative error")
        ax.set_title(f"model error ({final})")
        written.append(_save(fig, out_dir / "re_k.png"))
    return tuple(written)


def plot_upre(upre_csv, out) -> Path:
    """Predictive-risk curve over alpha with its minimizer marked."""
    alpha, risk = read_upre(upre_csv)
    if alpha.size == 0:
        raise ValueError(f"{upre_csv}: empty risk curve")
    best = int(np.argmin(risk))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.semilogx(alpha, risk)
        ax.plot([alpha[best]], [risk[best]], marker="o", color="C3")
        ax.annotate(
            f"$\\alpha^*$ = {alpha[best]:.4g}",
            (alpha[best], risk[best]),
            textcoords="offset points",
            xytext=(8, 8),
        )
        ax.set_xlabel(r"$\alpha$")
        ax.set_ylabel("predictive risk")
        ax.set_title("risk curve")
        return _save(fig, out)


def plot_spectrum(paths, out, labels=()) -> Path:
    """Overlay singular-value decays from one or more spectrum exports."""
    paths = tuple(paths)
    if labels and len(labels) != len(paths):
        raise ValueError(f"{len(paths)} inputs but {len(labels)} labels")
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for n, path in enumerate(paths):
            index, sigma = read_spectrum(path)
            if index.size == 0:
                raise ValueError(f"{path}: empty spectrum")
            name = labels[n] if labels else Path(path).stem
            ax.semilogy(index, sigma, label=name)
        ax.set_xlabel("index")
        ax.set_ylabel(r"$\sigma_i$")
        ax.set_title("singular value decay")
        ax.legend()
        return _save(fig, out)
