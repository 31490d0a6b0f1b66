"""`figures` command: render PNGs from inversion CSV outputs.

One subcommand per plot kind. Everything goes through PlotJob so the CLI
stays a thin argument-to-job translation.
"""

import argparse
import sys
from pathlib import Path

from .plots import AXIS_NAMES, PlotJob, run_job


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures", description="figures from gravity-inversion CSV outputs"
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    sec = sub.add_parser("section", help="density heat-map on a mesh plane")
    sec.add_argument("--in", dest="inputs", required=True, help="model.csv")
    sec.add_argument("--config", required=True, help="run config.txt (mesh geometry)")
    sec.add_argument("--axis", choices=AXIS_NAMES, default="y")
    sec.add_argument("--value", type=float, required=True, help="slice position (m)")
    sec.add_argument("--vmin", type=float, default=None, help="color scale low end")
    sec.add_argument("--vmax", type=float, default=None, help="color scale high end")
    sec.add_argument("--out", required=True, help="PNG path")

    dmap = sub.add_parser("map", help="plan view of the observed data")
    dmap.add_argument("--in", dest="inputs", required=True, help="data.csv")
    dmap.add_argument("--column", choices=("gz", "std"), default="gz")
    dmap.add_argument("--out", required=True, help="PNG path")

    conv = sub.add_parser("convergence", help="alpha and error against iteration")
    conv.add_argument("--in", dest="inputs", required=True, help="log.csv")
    conv.add_argument(
        "--out", required=True, help="directory for alpha_k.png and re_k.png"
    )

    upre = sub.add_parser("upre", help="predictive-risk curve")
    upre.add_argument("--in", dest="inputs", required=True, help="upre_k.csv")
    upre.add_argument("--out", required=True, help="PNG path")

    spec = sub.add_parser("spectrum", help="singular-value decay overlay")
    spec.add_argument(
        "--in", dest="inputs", required=True, nargs="+", help="spectrum.csv files"
    )
    spec.add_argument("--labels", nargs="+", default=(), help="one legend entry per input")
    spec.add_argument("--out", required=True, help="PNG path")

    return parser


def job_from_args(args) -> PlotJob:
    inputs = args.inputs if isinstance(args.inputs, list) else [args.inputs]
    extra = {}
    if args.kind == "section":
        extra = dict(
            config=Path(args.config),
            axis=args.axis,
            value=args.value,
            vmin=args.vmin,
            vmax=args.vmax,
        )
    elif args.kind == "map":
        extra = dict(column=args.column)
    elif args.kind == "spectrum":
        extra = dict(labels=tuple(args.labels))
    return PlotJob(
        kind=args.kind,
        inputs=tuple(Path(p) for p in inputs),
        output=Path(args.out),
        **extra,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for path in run_job(job_from_args(args)):
            print(path)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
