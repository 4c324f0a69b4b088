"""Facet and vertex counts of random sphere hulls against the inradius bound."""
import argparse
import time

from facetlab.families import random_hull
from facetlab.verify import check_prop1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--points", type=int, nargs="+", default=[200, 400])
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()

    print(f"{'n':>2} {'m':>5} {'seed':>4} {'r':>7} {'facets':>7} {'verts':>6} {'bound':>9} {'verdict':>8} {'sec':>6}")
    for n in args.dims:
        for m in args.points:
            for seed in range(args.seeds):
                t0 = time.perf_counter()
                rep = check_prop1(random_hull(n, m, seed))
                d = rep.details
                bound = f"{10 ** rep.rhs_log10:.1f}" if rep.rhs_log10 is not None else "-"
                print(f"{n:>2} {m:>5} {seed:>4} {d['r']:>7.4f} {d['facets']:>7} {d['vertices']:>6} "
                      f"{bound:>9} {rep.verdict:>8} {time.perf_counter() - t0:>6.1f}")


if __name__ == "__main__":
    main()
