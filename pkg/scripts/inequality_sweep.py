"""Sweep the four Green's inequalities of the conjugate problem and report the tightest margins."""

import argparse
import csv
import sys
import time

import numpy as np

from nablafrac import inequality_margins

NAMES = ("max G <= 0", "min G + bound >= 0", "row sum - bound <= 0", "diff sum - bound <= 0")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-length", type=int, default=12)
    parser.add_argument("--nu-step", type=float, default=0.1)
    parser.add_argument("--method", choices=("closed", "constructed"), default="closed")
    parser.add_argument("--csv", help="write every cell to this file")
    args = parser.parse_args()

    nus = np.arange(args.nu_step, 1.0 - 1e-9, args.nu_step)
    start = time.perf_counter()
    reports = [inequality_margins(0, n, round(float(nu), 10), args.method)
               for n in range(2, args.max_length + 1) for nu in nus]
    elapsed = time.perf_counter() - start

    margins = np.array([r.margins for r in reports])
    signs = np.array([-1, 1, -1, -1])  # positive slack means the inequality holds
    slack = margins * signs
    for j, name in enumerate(NAMES):
        worst = reports[int(slack[:, j].argmin())]
        print(f"{name:24s} min slack {slack[:, j].min(): .3e} at b - a = {worst.b - worst.a:g}, nu = {worst.nu:g}")
    failed = [r for r in reports if not r.passed()]
    print(f"{len(reports)} cells, {len(failed)} failing, {elapsed:.2f}s")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["b_minus_a", "nu", "m1", "m2", "m3", "m4", "passed"])
            for r in reports:
                w.writerow([r.b - r.a, r.nu, *r.margins, r.passed()])
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
