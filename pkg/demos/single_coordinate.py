"""Metrics generated by a single-coordinate function h.

For each h the script builds the tensor, hands it to the general solver
without telling it where it came from, and compares the recovered factor
with exp(-int_0^x h).  The completeness flag is printed as well.
"""

import argparse

import numpy as np

from prescurv.exprlang import parse
from prescurv.grid import Grid
from prescurv.prescribed import (PrescribedProblem, Thresholds, completeness_flag,
                                 construct_from_h, solve)

DEFAULT_H = ["sinh(x1)", "2*x1/(1+x1^2)", "2*x1", "-2*x1"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("h", nargs="*", default=DEFAULT_H, help="expressions in x1")
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()

    grid = Grid.cube(3, points_per_axis=args.points, axes=(1,))
    P = grid.points()
    for text in args.h:
        T, u = construct_from_h(text, 1, 1.0, 3)
        res = solve(PrescribedProblem(T, (0.0,) * 3, grid, Thresholds()))
        err = np.abs(res.values(P) - u.jet_batch(P, 0)[0]).max()
        flag = completeness_flag(parse(text, 3), 1)
        print(f"h = {text:16s} C = {res.scale:.12f}  max |u - exp(-int h)| = {err:.1e}  "
              f"completeness: {flag.status}{' (' + flag.reason + ')' if flag.reason else ''}")


if __name__ == "__main__":
    main()
