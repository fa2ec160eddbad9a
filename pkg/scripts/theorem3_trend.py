"""Forward/inverse display values for A = X_2 as r_j doubles.

Prints CSV: j, r_j, expr0, expr1 for both directions and |expr1 - mu(A)|.
"""
import argparse
import csv
import sys

from sidon_poisson import Construction, ConstructionParams
from sidon_poisson.dynamics import fraction_str, render, theorem3_stats


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=11)
    ap.add_argument("--set-stage", type=int, default=2)
    ap.add_argument("--max-j", type=int, default=4)
    args = ap.parse_args()

    con = Construction(ConstructionParams.paper(args.d))
    A = con.tower(args.set_stage)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["j", "r_j", "fwd_expr0", "fwd_expr1", "inv_expr0", "inv_expr1", "distance", "distance_dec"])
    for j in range(max(2, args.set_stage), args.max_j + 1):
        f = theorem3_stats(con, A, j)
        i = theorem3_stats(con, A, j, "inverse")
        dist = abs(f.expr1 - A.measure)
        w.writerow([j, f.r_j, *map(fraction_str, (f.expr0, f.expr1, i.expr0, i.expr1, dist)), render(dist)])


if __name__ == "__main__":
    main()
