"""Command-line interface: loss scans to CSV, optional figure rendering.

``corrqkd scan`` reads a config file, runs the scan and writes one CSV row
per grid point with the columns

    loss_db,eta,e_X,e_Z,Y_Z,R,w_max,d0x,status

All numbers carry 17 significant digits, so output is byte-for-byte
deterministic for identical configs.  Exit codes: 0 success, 2 config
error, 3 I/O error.  ``corrqkd plot`` overlays existing scan CSVs into a
figure file.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import keyrate, plotting
from .config import ConfigError, ScanConfig, parse_config

CSV_HEADER = "loss_db,eta,e_X,e_Z,Y_Z,R,w_max,d0x,status"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def points_to_csv(points) -> str:
    lines = [CSV_HEADER]
    for p in points:
        lines.append(
            ",".join(
                [
                    _fmt(p.loss_db),
                    _fmt(p.eta),
                    _fmt(p.e_x),
                    _fmt(p.e_z),
                    _fmt(p.y_z_sifted),
                    _fmt(p.rate),
                    _fmt(p.w_max),
                    _fmt(p.d0x),
                    p.status,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def run(config: ScanConfig, plot_path: str | None = None) -> int:
    """Execute one scan and write the CSV (and optional figure)."""
    points = keyrate.scan(config)
    try:
        with open(config.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(points_to_csv(points))
        if plot_path is not None:
            plotting.render_points(points, plot_path)
    except OSError as exc:
        print(f"corrqkd: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrqkd",
        description="Secret key rates for loss-tolerant QKD with correlated sources",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="run a loss scan and write CSV")
    scan.add_argument("--config", required=True, help="path to the config file")
    scan.add_argument("--out", help="override the config's CSV output path")
    scan.add_argument("--plot", help="also render the curve to this figure file")
    scan.add_argument(
        "--four-state", action="store_true", help="enable the four-state variant"
    )
    scan.add_argument(
        "--sin-printed",
        action="store_true",
        help="use the historical coefficient convention",
    )
    scan.add_argument(
        "--worst-case-combine",
        action="store_true",
        help="combine four-state branches by the worst case",
    )

    plot = sub.add_parser("plot", help="overlay scan CSVs into a figure")
    plot.add_argument("csvs", nargs="+", help="scan CSV files")
    plot.add_argument("--out", required=True, help="figure output path")
    plot.add_argument("--labels", nargs="*", help="curve labels")
    plot.add_argument("--title", help="figure title")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "plot":
        try:
            plotting.render_rate_curves(
                args.csvs, args.out, labels=args.labels, title=args.title
            )
        except OSError as exc:
            print(f"corrqkd: {exc}", file=sys.stderr)
            return EXIT_IO
        return EXIT_OK

    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"corrqkd: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        config = parse_config(text)
    except ConfigError as exc:
        print(f"corrqkd: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    overrides: dict[str, object] = {}
    if args.out:
        overrides["out"] = args.out
    if args.four_state:
        overrides["four_state"] = True
    if args.sin_printed:
        overrides["sin_printed"] = True
    if args.worst_case_combine:
        overrides["worst_case_combine"] = True
    if overrides:
        config = dataclasses.replace(config, **overrides)

    return run(config, plot_path=args.plot)


if __name__ == "__main__":
    raise SystemExit(main())
