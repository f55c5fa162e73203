"""Command-line interface.

Exit codes: 0 success, 1 bad input (config, flags, arguments), 2 run-time
breakdown of the contour evolution (partial output is still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import kernels
from .config import build_initial_system, parse_config
from .dynamics import near_boundary_mask, velocity_field
from .errors import ConfigError, StripVortexError
from .evolution import run
from .frames import FrameWriter, dumps, read_frames, replicated_frame_dict, write_velocity_csv

EXIT_OK, EXIT_INPUT, EXIT_BREAKDOWN = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _parse_grid(text):
    fields = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise ConfigError(f"grid entry {part!r} is not key=value", "--grid")
        fields[key.strip()] = value.strip()
    if set(fields) != {"nx", "ny", "x2min", "x2max"}:
        raise ConfigError("grid needs exactly nx, ny, x2min, x2max", "--grid")
    try:
        nx, ny = int(fields["nx"]), int(fields["ny"])
        lo, hi = float(fields["x2min"]), float(fields["x2max"])
    except ValueError as exc:
        raise ConfigError(str(exc), "--grid") from None
    if nx < 1 or ny < 1:
        raise ConfigError("nx and ny must be >= 1", "--grid")
    return nx, ny, lo, hi


def _parse_point(text):
    try:
        x1, x2 = (float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"expected 'x1,x2', got {text!r}", "--point") from None
    return np.array([x1, x2])


def _read_config(path):
    try:
        with open(path, "rb") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(str(exc), "--config") from None


def cmd_simulate(args):
    config = _read_config(args.config)
    with open(args.out, "w", encoding="utf-8", newline="\n") as out:
        result = run(config, on_frame=FrameWriter(out))
    if not result.ok:
        print(result.breakdown, file=sys.stderr)
        return EXIT_BREAKDOWN
    return EXIT_OK


def cmd_velocity(args):
    config = _read_config(args.config)
    nx, ny, lo, hi = _parse_grid(args.grid)
    system = build_initial_system(config)
    x1 = -0.5 + np.arange(nx) / nx
    x2 = np.linspace(lo, hi, ny) if ny > 1 else np.array([lo])
    gx, gy = np.meshgrid(x1, x2)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    mask = near_boundary_mask(system, pts)
    u = np.full_like(pts, np.nan)
    if (~mask).any():
        u[~mask] = velocity_field(system, pts[~mask], check=False)
    with open(args.out, "w", encoding="utf-8", newline="\n") as out:
        write_velocity_csv(pts, u, out)
    return EXIT_OK


def cmd_kernel(args):
    d = _parse_point(args.point)
    out = {
        "point": d,
        "rho": float(kernels.rho(d)),
        "green": float(kernels.green(d)),
        "k_inf": kernels.k_inf(d),
        "grad_k_inf": kernels.grad_k_inf(d),
    }
    print(dumps(out))
    return EXIT_OK


def cmd_replicate(args):
    if args.copies < 1:
        raise ConfigError("must be >= 1", "--copies")
    frames = read_frames(args.frames)
    with open(args.out, "w", encoding="utf-8", newline="\n") as out:
        for f in frames:
            out.write(dumps(replicated_frame_dict(f, args.copies)) + "\n")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="stripvortex", description="Contour dynamics of vortex patches and layers on the periodic strip.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="evolve a config and write JSON Lines frames")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("velocity", help="write the initial velocity field on a grid as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", required=True, help='"nx=..,ny=..,x2min=..,x2max=.."')
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_velocity)

    p = sub.add_parser("kernel", help="print rho, G, K_inf and grad K_inf at a point as JSON")
    p.add_argument("--point", required=True, help='"x1,x2"')
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("replicate", help="export horizontally replicated contours from a frame file")
    p.add_argument("--frames", required=True)
    p.add_argument("--copies", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replicate)
    return parser


def cli_main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StripVortexError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(cli_main())
