"""Print the conjugate Green's function on N_0^5 at nu = 1/2 and show it is not symmetric."""

import argparse
from fractions import Fraction

import numpy as np

from nablafrac import SelfAdjointProblem, SturmLiouvilleBC, conjugate_table, greens_function


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--b", type=int, default=5)
    parser.add_argument("--nu", type=float, default=0.5)
    args = parser.parse_args()

    built = greens_function(SelfAdjointProblem.build(0, args.b, args.nu), SturmLiouvilleBC.dirichlet()).matrix
    closed = conjugate_table(0, args.b, args.nu)
    np.set_printoptions(precision=6, suppress=True, linewidth=120)
    print(f"G(t, s) on N_0^{args.b}, nu = {args.nu} (rows t, columns s)")
    print(built)
    print(f"max |constructed - closed form| = {np.abs(built - closed).max():.2e}")
    asym = np.abs(built - built.T)
    i, k = np.unravel_index(asym.argmax(), asym.shape)
    print(f"largest asymmetry at (t, s) = ({i}, {k}): G = {built[i, k]:.12f}, G^T = {built[k, i]:.12f}")
    if args.b >= 3:
        for t, s in ((2, 3), (3, 2)):
            g = built[t, s]
            print(f"G({t},{s}) = {g:.15f} ~ {Fraction(g).limit_denominator(1000)}")


if __name__ == "__main__":
    main()
