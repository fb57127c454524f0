"""Command line entry point.

Every subcommand accepts ``--config FILE`` with flat ``key = value`` lines
named like the long flags (``ratio-steps = 9`` or ``ratio_steps = 9``);
flags given on the command line win over the file.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from . import closed_form
from .errors import ConvergenceError, DomainError
from .experiments import RunConfig, rows_to_csv, sweep, verify_theorem1, verify_theorem2
from .fem import mu2_converged
from .geometry import ParallelogramSpec
from .render import write_dissection_svg
from .scissors import dissect, verify_dissection

log = logging.getLogger("neumann_scissors")

EXIT_OK, EXIT_USAGE, EXIT_CHECK_FAILED = 0, 1, 2


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def _shape_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=float, required=True, help="longer side")
    p.add_argument("--b", type=float, required=True, help="shorter side")
    p.add_argument("--alpha", type=float, required=True, help="smallest angle in radians")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neumann-scissors",
        description="Neumann eigenvalues of parallelograms versus rectangles.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key=value file mirroring the flags")
        return p

    p = add("dissect", "cut a parallelogram into pieces that translate onto its rectangle")
    _shape_args(p)
    p.add_argument("--svg", help="write source/target picture here")
    p.add_argument("--json", help="write the dissection here")

    p = add("mu2", "finite element mu_2 with mesh-ladder extrapolation")
    _shape_args(p)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--json", help="write the spectrum result here")

    p = add("verify", "check one theorem on one parallelogram")
    p.add_argument("theorem", choices=["t1", "t2"])
    _shape_args(p)
    p.add_argument("--tol", type=float, default=1e-3)

    p = add("sweep", "theorem checks over a (b/a, alpha) grid with a = 1")
    p.add_argument("--ratio-min", type=float, default=0.1)
    p.add_argument("--ratio-max", type=float, default=1.0)
    p.add_argument("--ratio-steps", type=int, default=5)
    p.add_argument("--alpha-min", type=float, default=math.pi / 6)
    p.add_argument("--alpha-max", type=float, default=math.pi / 2)
    p.add_argument("--alpha-steps", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--region-filter", choices=["theorem1", "theorem2"])
    p.add_argument("--render-dissections", metavar="DIR", help="write one SVG per cell")
    p.add_argument("--szego", action="store_true", help="report the Szego sanity check")

    add("constants", "print reference constants as CSV")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((tok for tok in argv if tok in COMMANDS), None)
    if known.config is None or command is None:
        return parser.parse_args(argv)
    subparser = parser._subparsers._group_actions[0].choices[command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in read_config(known.config).items():
        if key not in actions or key in ("config", "help"):
            raise DomainError(f"unknown config key {key!r} for {command}")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = action.type(raw) if action.type else raw
        action.required = False
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _spec(args) -> ParallelogramSpec:
    spec = ParallelogramSpec(args.a, args.b, args.alpha)
    if spec.alpha < 0.2:
        log.warning("alpha = %.3g is very oblique; mesh quality and convergence degrade", spec.alpha)
    return spec


def cmd_dissect(args) -> int:
    d = dissect(_spec(args))
    report = verify_dissection(d)
    print(f"full_strips={d.full_strips} remainder={d.remainder!r} pieces={len(d.pieces)}")
    for i, piece in enumerate(d.pieces):
        print(f"  piece {i}: {len(piece.polygon)} vertices, shift {piece.shift!r}")
    print(f"area_defect={report.area_defect:.3e} max_overlap={report.max_overlap:.3e} "
          f"out_of_target={report.out_of_target:.3e} verified={report.passed}")
    for msg in report.failures:
        print(f"  FAIL {msg}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(d.to_json(indent=1))
    if args.svg:
        write_dissection_svg(d, args.svg)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_mu2(args) -> int:
    spec = _spec(args)
    result = mu2_converged(spec, args.tol)
    print("nx,ny,nodes,mu2,extrapolated,order")
    for row in result.ladder:
        print(",".join("" if row[k] is None else str(row[k])
                       for k in ("nx", "ny", "nodes", "mu2", "extrapolated", "order")))
    print(f"mu2={result.mu2!r}")
    if spec.satisfies_theorem1():
        print(f"mu2_R={closed_form.mu2_rect_upper_bound_for_parallelogram(spec)!r}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(result.to_json(indent=1))
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec(args)
    check = verify_theorem1 if args.theorem == "t1" else verify_theorem2
    row = check(spec, args.tol)
    shown = ["region", "mu2_fem", "mu2_R", "trial_bound", "M2", "theorem2_bound", "passed"]
    for key in shown:
        value = getattr(row, key)
        if value is not None:
            print(f"{key}={value!r}" if not isinstance(value, str) else f"{key}={value}")
    return EXIT_OK if row.passed else EXIT_CHECK_FAILED


def cmd_sweep(args) -> int:
    config = RunConfig(
        ratio_min=args.ratio_min, ratio_max=args.ratio_max, ratio_steps=args.ratio_steps,
        alpha_min=args.alpha_min, alpha_max=args.alpha_max, alpha_steps=args.alpha_steps,
        tol=args.tol, out=args.out, workers=args.workers, region_filter=args.region_filter,
        render_dissections=args.render_dissections, szego=args.szego)
    if config.alpha_min < 0.2:
        log.warning("alpha_min = %.3g is very oblique; mesh quality and convergence degrade",
                    config.alpha_min)
    rows = sweep(config)
    text = rows_to_csv(rows)
    if config.out:
        with open(config.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if config.render_dissections:
        os.makedirs(config.render_dissections, exist_ok=True)
        for i, row in enumerate(rows):
            d = dissect(ParallelogramSpec(row.a, row.b, row.alpha))
            write_dissection_svg(d, os.path.join(config.render_dissections, f"cell_{i:03d}.svg"))
    if config.szego:
        bound = closed_form.szego_bound_product()
        products = [r.mu2_fem * r.area for r in rows if r.mu2_fem is not None]
        worst = max(products, default=float("nan"))
        print(f"szego: max mu2*area = {worst!r} <= {bound!r}: {worst <= bound}", file=sys.stderr)
    failures = sum(r.failed for r in rows)
    print(f"{len(rows)} rows, {failures} failed checks", file=sys.stderr)
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def cmd_constants(args) -> int:
    print("name,value")
    print(f"M2_square,{closed_form.M2_SQUARE!r}")
    print(f"pi_squared,{closed_form.PI2!r}")
    print(f"szego_product,{closed_form.szego_bound_product()!r}")
    return EXIT_OK


COMMANDS = {"dissect": cmd_dissect, "mu2": cmd_mu2, "verify": cmd_verify,
            "sweep": cmd_sweep, "constants": cmd_constants}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:  # argparse usage errors exit with 2; remap to the usage code
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
