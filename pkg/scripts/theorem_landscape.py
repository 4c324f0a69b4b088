"""log10 of the facet lower bound over (n, N) at a few inradii, next to its r = 1 simplification."""
import argparse
import math

from facetlab.verify import HypothesisViolated, remark6_bound, theorem_rhs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[30, 50, 100, 200, 500, 1000])
    ap.add_argument("--covers", type=int, nargs="+", default=[3, 5, 10, 20, 100])
    ap.add_argument("--radii", type=float, nargs="+", default=[0.6, 0.8, 1.0])
    args = ap.parse_args()

    header = " ".join(f"r={r:<6g}" for r in args.radii)
    print(f"{'n':>5} {'N':>4} {header} {'r=1 simple':>10}")
    for n in args.dims:
        for N in args.covers:
            if math.log(N) >= n / 8:
                continue
            cells = []
            for r in args.radii:
                try:
                    cells.append(f"{theorem_rhs(n, N, r).log10:8.2f}")
                except HypothesisViolated:
                    cells.append(f"{'-':>8}")
            print(f"{n:>5} {N:>4} {' '.join(cells)} {remark6_bound(n, N).log10:>10.2f}")


if __name__ == "__main__":
    main()
