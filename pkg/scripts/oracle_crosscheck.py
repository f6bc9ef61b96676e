"""Compare the Green's function solver with the dense oracle on random BVPs.

Also counts how often the determinant test and the LU pivot test agree on
engineered singular problems.
"""

import argparse

import numpy as np

from nablafrac import SingularSystemError, dense_oracle_solve, solvability, solve_bvp
from nablafrac.sampling import ProblemRanges, random_bc, random_problem, singular_bc


def rel(x, y):
    return np.abs(x - y).max() / max(1.0, np.abs(y).max())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=500)
    parser.add_argument("--singular", type=int, default=200)
    parser.add_argument("--max-length", type=int, default=24)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--caputo-boundary-at-b", action="store_true")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    ranges = ProblemRanges(max_length=args.max_length)
    caputo = args.caputo_boundary_at_b
    errs, conds, skipped = [], [], 0
    while len(errs) < args.count:
        prob, bc = random_problem(rng, ranges), random_bc(rng)
        rep = solvability(prob, bc, caputo)
        if not rep.solvable:
            skipped += 1
            continue
        y = solve_bvp(prob, bc, caputo).values
        z = dense_oracle_solve(prob, bc, caputo).values
        errs.append(rel(y, z))
        conds.append(abs(rep.det_D) / rep.scale)
    errs = np.array(errs)
    print(f"solvable problems: {len(errs)} (skipped {skipped} singular draws)")
    print(f"relative error: median {np.median(errs):.2e}, max {errs.max():.2e}")
    print(f"smallest relative |det D|: {min(conds):.2e}")

    agree = 0
    for _ in range(args.singular):
        prob = random_problem(rng, ranges)
        bc = singular_bc(prob, rng, caputo)
        det_says = not solvability(prob, bc, caputo).solvable
        try:
            dense_oracle_solve(prob, bc, caputo)
            lu_says = False
        except SingularSystemError:
            lu_says = True
        agree += det_says and lu_says
    print(f"engineered singular cases flagged by both tests: {agree}/{args.singular}")


if __name__ == "__main__":
    main()
