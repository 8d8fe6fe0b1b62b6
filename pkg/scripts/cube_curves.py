#!/usr/bin/env python3
"""Cube-family growth against the bound curves.

For each dimension k the boolean cube over the first k positions is the
known lower-bound witness; this sweeps k, records gamma = S/N, and compares
it with the lower and upper growth curves so the remaining gap can be
plotted.  Direct pair summation cross-checks the product form on small k.
"""

import argparse
import csv
import math
import sys

from gcdsums import (
    PrimePowerWeights,
    cube_construction,
    cube_sum_closed_form,
    gcd_sum,
    general_upper_curve,
    lower_curve,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=0.5)
    parser.add_argument("--k-max", type=int, default=18)
    parser.add_argument("--direct-k-max", type=int, default=12,
                        help="largest k for the O(N^2) cross-check")
    parser.add_argument("--lower-constant", type=float, default=0.5)
    parser.add_argument("--upper-constant", type=float, default=7.0)
    parser.add_argument("--output", default=None)
    args = parser.parse_args()

    t = PrimePowerWeights(args.alpha)
    handle = open(args.output, "w", newline="") if args.output else sys.stdout
    writer = csv.writer(handle)
    writer.writerow([
        "k", "n", "gamma", "log_gamma", "lower_curve", "upper_curve",
        "log_gamma_over_log_lower", "direct_rel_gap",
    ])
    for k in range(1, args.k_max + 1):
        n = 1 << k
        closed = cube_sum_closed_form(t, k)
        gamma = closed / n
        if k <= args.direct_k_max:
            direct = gcd_sum(t, cube_construction(k))
            rel_gap = abs(direct - closed) / closed
        else:
            rel_gap = float("nan")
        if n >= 21:
            low = lower_curve(n, args.lower_constant)
            high = general_upper_curve(n, args.upper_constant)
            ratio = math.log(gamma) / math.log(low) if low > 1 else float("nan")
        else:
            low = high = ratio = float("nan")
        writer.writerow([k, n, gamma, math.log(gamma), low, high, ratio, rel_gap])
    if args.output:
        handle.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
