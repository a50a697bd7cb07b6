"""Command-line entry point: ``prescurv <task> --scenario FILE``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import PrescurvError
from .catalog import CATALOG
from .emit import emit
from .runner import run
from .schema import TASKS, load_scenario, parse_scenario

log = logging.getLogger("prescurv")

EXIT = {"OK": 0, "SOLUTION": 0, "NONEXISTENT": 2, "MISMATCH": 2, "INDETERMINATE": 3, "ERROR": 1}


def _odd(text: str) -> int:
    v = int(text)
    if v < 3 or v % 2 == 0:
        raise argparse.ArgumentTypeError("must be an odd integer >= 3")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prescurv", description=(
        "Decide whether a diagonal tensor T is realised as R = T (.) g by a conformal metric "
        "g/phi^2, reconstruct phi, and check curvature against a Christoffel oracle."))
    sub = p.add_subparsers(dest="task", required=True)
    for task in TASKS:
        s = sub.add_parser(task, help=f"run a {task} scenario")
        s.add_argument("--scenario", help="scenario JSON file")
        if task == "example":
            s.add_argument("--id", dest="example_id", choices=list(CATALOG),
                           help="built-in example to run")
            s.add_argument("--list", action="store_true", help="list built-in examples")
        s.add_argument("--out", help="write the report here instead of stdout")
        s.add_argument("--format", choices=("json", "csv"), default="json")
        s.add_argument("--grid-points", type=_odd, help="override points per axis")
        s.add_argument("--tol-accept", type=float, help="override the acceptance threshold")
        s.add_argument("--tol-reject", type=float, help="override the rejection threshold")
        s.add_argument("--quiet", action="store_true", help="print nothing but errors")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "list", False):
        for key, entry in CATALOG.items():
            print(f"{key:20s} {entry.description}")
        return 0
    try:
        if getattr(args, "example_id", None):
            scn = parse_scenario({"task": args.task, "example_id": args.example_id})
        elif args.scenario:
            scn = load_scenario(args.scenario)
        else:
            log.error("--scenario is required%s", " (or --id)" if args.task == "example" else "")
            return 1
        scn = scn.with_overrides(task=args.task, points_per_axis=args.grid_points,
                                 accept=args.tol_accept, reject=args.tol_reject)
        report = run(scn)
        text = emit(report, args.format, args.out)
    except (PrescurvError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1
    if args.out is None and not args.quiet:
        sys.stdout.write(text)
    elif not args.quiet:
        log.info("%s: verdict %s, report written to %s", args.task, report.verdict, args.out)
    if report.error:
        log.error("%s: %s", report.error["type"], report.error["message"])
    return EXIT[report.verdict]


if __name__ == "__main__":
    sys.exit(main())
