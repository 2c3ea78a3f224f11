"""Bump-problem error against threshold for orders 4-6; writes convergence.csv."""

import argparse
import csv
import math
from pathlib import Path

from ltsab.experiments import RunConfig, run_convergence

# each order starts at the coarsest threshold where it is stable
THRESHOLDS = {
    4: [2.0 ** -e for e in range(11, 15)],
    5: [2.0 ** -e for e in range(11, 15)],
    6: [2.0 ** -e for e in range(12, 16)],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    rows = run_convergence(RunConfig(), sorted(THRESHOLDS), THRESHOLDS)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "convergence.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["order", "threshold", "linf_error", "slope"])
        for r in rows:
            w.writerow([r.order, repr(r.threshold), repr(r.error), f"{r.slope:.4f}"])
            print(f"order {r.order} threshold 2^{math.log2(r.threshold):.0f} "
                  f"error {r.error:.3e} slope {r.slope:.2f}")


if __name__ == "__main__":
    main()
