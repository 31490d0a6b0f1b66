"""Figure generation for gravity-inversion CSV outputs."""

from .plots import (
    KINDS,
    PlotJob,
    plot_convergence,
    plot_map,
    plot_section,
    plot_spectrum,
    plot_upre,
    run_job,
)

__all__ = [
    "KINDS",
    "PlotJob",
    "plot_convergence",
    "plot_map",
    "plot_section",
    "plot_spectrum",
    "plot_upre",
    "run_job",
]
