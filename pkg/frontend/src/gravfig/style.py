"""The one house style. Plot functions apply it through rc_context so the
caller's global matplotlib state is never touched."""

STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "figure.figsize": (6.0, 4.0),
    "font.size": 9,
    "font.family": "DejaVu Sans",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linewidth": 0.5,
    "lines.linewidth": 1.4,
    "lines.markersize": 4,
    "image.cmap": "viridis",
    "legend.framealpha": 0.9,
    "savefig.bbox": "tight",
}
