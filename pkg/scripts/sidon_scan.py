"""Scan return times m in (h_j, h_{j+1}] and classify X_j ∩ T^-m X_j."""
import argparse
import csv
import sys

from sidon_poisson import Construction, ConstructionParams
from sidon_poisson.dynamics import fraction_str, sidon_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=11)
    ap.add_argument("--j", type=int, default=1)
    ap.add_argument("--budget", type=int, default=10**6)
    ap.add_argument("--random", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--all", action="store_true", help="also print empty witnesses")
    args = ap.parse_args()

    con = Construction(ConstructionParams.paper(args.d))
    scan = sidon_scan(con, args.j, budget=args.budget, n_random=args.random, seed=args.seed)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["m", "kind", "columns", "measure"])
    for w in scan.witnesses:
        if args.all or w.kind != "empty":
            out.writerow([w.m, w.kind, " ".join(map(str, w.columns)), fraction_str(w.measure)])
    print(f"# mode={scan.mode} tested={len(scan.witnesses)} violations={len(scan.violations)}", file=sys.stderr)
    return 1 if scan.violations else 0


if __name__ == "__main__":
    sys.exit(main())
