"""Worst-case ratio of the APSP estimator on the two-cluster bridge graph.

Random graphs stay far below 2(1+eps)^2; this family pushes the hub-detour
term towards 3 * d.

    python scripts/bridge_counterexample.py
"""

import argparse

from bccsim.algorithms.apsp import apsp_approx, approximation_bound
from bccsim.graphcore import exact_apsp
from bccsim.instances import bridge_graph


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--hubdist", default="150,170,190,198")
    args = ap.parse_args()
    print(f"{'hubdist':>7} {'n':>3} {'hubs':>10} {'ratio(u,v)':>10} {'max ratio':>9} {'2(1+eps)^2':>10} {'3(1+eps)':>8}")
    for hd in (int(x) for x in args.hubdist.split(",")):
        g, u, v = bridge_graph(hubdist=hd)
        m, _ = apsp_approx(g)
        d = exact_apsp(g)
        ratio = m[u, v] * g.p / d[u][v]
        print(f"{hd:>7} {g.n:>3} {str(m.hubs):>10} {float(ratio):>10.4f} {float(m.max_ratio(d)):>9.4f} "
              f"{float(approximation_bound(m.eps)):>10.4f} {float(3 * (1 + m.eps)):>8.4f}")


if __name__ == "__main__":
    main()
