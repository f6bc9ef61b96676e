"""Compare the rho criterion with the determinant test for both right boundary rows.

With q = 0 the determinant from the Caputo row at b is p(a+1) * rho exactly.
With the plain backward difference the two differ whenever delta != 0, so a
rho = 0 problem can still be uniquely solvable.
"""

import argparse

import numpy as np

from nablafrac import solvability
from nablafrac.sampling import ProblemRanges, random_problem, zero_rho_bc


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    ranges = ProblemRanges(zero_q=True)
    singular = {True: 0, False: 0}
    for _ in range(args.count):
        prob = random_problem(rng, ranges)
        bc = zero_rho_bc(prob, rng)
        for caputo in (True, False):
            singular[caputo] += not solvability(prob, bc, caputo).solvable
    print(f"{args.count} problems with rho = 0 (q = 0)")
    print(f"  flagged singular with the Caputo row at b: {singular[True]}")
    print(f"  flagged singular with the plain difference at b: {singular[False]}")


if __name__ == "__main__":
    main()
