"""Command-line entry point: ``mwmusic <forward|svd|image|oracle|compare> ...``.

Exit codes: 0 on success, 2 on a validation or usage error, 3 on an IO error.
Tables and reports go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .compare import compare_maps, min_antenna_distance
from .forward import add_noise, assemble_extended, assemble_point_targets, mask
from .io import parse_scene, read_image, read_matrix, write_image, write_matrix, write_pgm
from .music import decompose, image_map
from .oracle import oracle_map_multi, oracle_map_single
from .specfun import SeriesBudget

__all__ = ["build_parser", "run", "main"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits on its own; raise instead so run() owns the exit code.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mwmusic", description="MUSIC imaging from scattering matrices.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("forward", help="synthesize a scattering matrix from a scene")
    f.add_argument("--scene", required=True, help="scene file or bundled scene name")
    f.add_argument("--out", required=True, help="matrix file to write")
    f.add_argument("--extended", action="store_true", help="use disk quadrature instead of point targets")
    f.add_argument("--cell-m", type=float, default=None,
                   help="quadrature cell size in metres (default: smallest radius / 16)")
    f.add_argument("--noise-snr-db", type=float, default=math.inf)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--diag", choices=("known", "unknown", "zeroed"), default="known")

    s = sub.add_parser("svd", help="print the singular-value table of a matrix")
    s.add_argument("--in", dest="inp", required=True)

    i = sub.add_parser("image", help="evaluate the MUSIC imaging function")
    i.add_argument("--in", dest="inp", required=True)
    i.add_argument("--scene", required=True)
    i.add_argument("--out", required=True)
    sel = i.add_mutually_exclusive_group()
    sel.add_argument("--select", type=_positive_int, default=None, metavar="M")
    sel.add_argument("--select-ratio", type=float, default=None, metavar="T")
    i.add_argument("--mode", choices=("tm", "dm"), default="dm")
    i.add_argument("--steering", choices=("exact", "farfield"), default="exact")
    i.add_argument("--norm", choices=("unit", "raw"), default="unit")
    i.add_argument("--grid", type=_positive_int, default=201, metavar="NX")
    i.add_argument("--pgm", default=None, help="also write a P2 raster here")

    o = sub.add_parser("oracle", help="evaluate the closed-form imaging function")
    o.add_argument("--scene", required=True)
    o.add_argument("--out", required=True)
    o.add_argument("--nu-max", type=_positive_int, default=None)
    o.add_argument("--grid", type=_positive_int, default=201, metavar="NX")
    o.add_argument("--pgm", default=None)

    c = sub.add_parser("compare", help="compare two image files")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--scene", default=None, help="scene providing antenna positions for the mask")
    c.add_argument("--min-antenna-distance", type=float, default=None, metavar="METRES")
    return p


def _cmd_forward(args):
    scene = parse_scene(args.scene)
    if not scene.anomalies:
        raise ValueError("scene has no anomalies")
    if args.extended:
        cell = args.cell_m if args.cell_m is not None else min(a.radius for a in scene.anomalies) / 16
        matrix = assemble_extended(scene, cell)
    else:
        if args.cell_m is not None:
            raise ValueError("--cell-m only applies with --extended")
        matrix = assemble_point_targets(scene)
    if args.diag != "known":
        matrix = mask(matrix, args.diag)
    matrix = add_noise(matrix, args.noise_snr_db, args.seed)
    write_matrix(matrix, args.out)


def _cmd_svd(args):
    matrix = read_matrix(args.inp)
    if matrix.diagonal_state == "unknown":
        print("note: unknown diagonal zeroed before decomposition", file=sys.stderr)
        matrix = mask(matrix, "zeroed")
    tau = decompose(matrix).singulars
    print("index,tau,tau_over_tau1")
    top = tau[0] if tau[0] > 0 else 1.0
    for idx, t in enumerate(tau, start=1):
        print(f"{idx},{t:.17g},{t / top:.17g}")


def _cmd_image(args):
    matrix = read_matrix(args.inp)
    scene = parse_scene(args.scene)
    if matrix.n != scene.array.n:
        raise ValueError(f"matrix has N={matrix.n} but the scene array has n={scene.array.n}")
    if args.mode == "dm":
        matrix = mask(matrix, "zeroed")
    else:
        if matrix.diagonal_state != "known":
            raise ValueError("--mode tm needs a matrix with a known diagonal")
        if args.select is None and args.select_ratio is None:
            raise ValueError("--mode tm needs --select or --select-ratio")
    img = image_map(matrix, scene, nx=args.grid, fixed=args.select, ratio=args.select_ratio,
                    mode=args.steering, normalization=args.norm)
    write_image(img, args.out)
    if args.pgm:
        write_pgm(img, args.pgm)
    print(f"M={img.metadata['M']} argmax={list(img.argmax())}", file=sys.stderr)


def _cmd_oracle(args):
    scene = parse_scene(args.scene)
    budget = SeriesBudget(args.nu_max) if args.nu_max is not None else None
    build = oracle_map_single if len(scene.anomalies) == 1 else oracle_map_multi
    img = build(scene, nx=args.grid, budget=budget)
    write_image(img, args.out)
    if args.pgm:
        write_pgm(img, args.pgm)


def _cmd_compare(args):
    a = read_image(args.a)
    b = read_image(args.b)
    node_mask = None
    if args.min_antenna_distance is not None:
        if args.scene is None:
            raise ValueError("--min-antenna-distance needs --scene")
        scene = parse_scene(args.scene)
        node_mask = min_antenna_distance(a, scene.positions()) >= args.min_antenna_distance
    report = compare_maps(a, b, node_mask)
    print(json.dumps(report, sort_keys=True, allow_nan=True))


_COMMANDS = {
    "forward": _cmd_forward,
    "svd": _cmd_svd,
    "image": _cmd_image,
    "oracle": _cmd_oracle,
    "compare": _cmd_compare,
}


def run(argv=None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"mwmusic {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"mwmusic {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run())
