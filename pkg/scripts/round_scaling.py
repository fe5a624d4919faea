"""Rounds used by the APSP pipeline as n grows, with the fitted log-log slope.

    python scripts/round_scaling.py --sizes 16,32,64,128,256 --reps 2
"""

import argparse
from math import log

from bccsim.algorithms.apsp import apsp_approx
from bccsim.cli import gen_random


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="16,32,64,128,256")
    ap.add_argument("--reps", type=int, default=1)
    ap.add_argument("--density", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    means = {}
    print(f"{'n':>5} {'k':>3} {'h':>4} {'|R|':>4} {'levels':>6} {'rounds':>8} {'rounds/sqrt(n)':>15}")
    for n in sizes:
        total = 0
        for r in range(args.reps):
            m, _ = apsp_approx(gen_random(n, 16, args.density, args.seed + r))
            total += m.rounds
        means[n] = total / args.reps
        print(f"{n:>5} {m.k:>3} {m.h:>4} {len(m.hubs):>4} {m.levels:>6} {means[n]:>8.0f} {means[n] / n**0.5:>15.1f}")
    if len(sizes) > 1:
        lo, hi = sizes[0], sizes[-1]
        print(f"slope d log(rounds) / d log(n) between {lo} and {hi}: "
              f"{log(means[hi] / means[lo]) / log(hi / lo):.3f}  (0.5 = sqrt growth)")


if __name__ == "__main__":
    main()
