#!/usr/bin/env python3
"""Exhaustive extremal values over small downset spaces.

Tabulates the best gamma = S/N per cardinality together with every tied
maximizer and its completeness verdict.  Useful for eyeballing how the
extremal structure shifts with the weight exponent.
"""

import argparse
import json
import sys

from gcdsums import PrimePowerWeights, extremal_sf, is_complete


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alphas", type=float, nargs="+", default=[0.5, 0.8, 1.0])
    parser.add_argument("--max-index", type=int, default=5)
    parser.add_argument("--n-max", type=int, default=10)
    parser.add_argument("--output", default=None)
    args = parser.parse_args()

    rows = []
    for alpha in args.alphas:
        t = PrimePowerWeights(alpha)
        for n in range(1, min(args.n_max, 1 << args.max_index) + 1):
            report = extremal_sf(t, n, args.max_index)
            rows.append({
                "alpha": alpha,
                "n": n,
                "max_index": args.max_index,
                "gamma": report.gamma,
                "candidates": report.candidates,
                "maximizers": [[str(m) for m in s] for s in report.maximizers],
                "all_complete": all(is_complete(s) for s in report.maximizers),
            })

    text = json.dumps(rows, indent=2)
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
