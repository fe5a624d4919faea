"""Weighted and unweighted gadget diameters grouped by input class.

Classes: all-zero inputs, disjoint inputs containing a 1-bit, intersecting
inputs.  The second class sits at 1 + 2/p rather than 1 + 1/p.

    python scripts/gadget_table.py --count 200 --p 16
"""

import argparse
import random
from collections import Counter

from bccsim.cli import random_gadget_instances
from bccsim.graphcore import exact_diameter
from bccsim.lowerbound import build_gab, disjointness


def klass(inst):
    if not disjointness(inst):
        return "intersecting"
    return "disjoint, has 1-bits" if any(inst.a) or any(inst.b) else "all-zero"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--p", type=int, default=16)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    table = Counter()
    for inst in random_gadget_instances(args.count, args.seed):
        w = exact_diameter(build_gab(inst, args.p).graph)
        u = exact_diameter(build_gab(inst, weighted=False).graph)
        table[(inst.k, klass(inst), str(w), str(u))] += 1
    print(f"{'k':>2}  {'class':<22} {'weighted D':>10} {'unweighted D':>12} {'count':>6}")
    for (k, c, w, u), cnt in sorted(table.items()):
        print(f"{k:>2}  {c:<22} {w:>10} {u:>12} {cnt:>6}")


if __name__ == "__main__":
    main()
