"""Global against local stepping on the bump problem; writes speed.csv."""

import argparse
import csv
from pathlib import Path

from ltsab.experiments import RunConfig, run_speed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=5)
    ap.add_argument("--threshold-exp", type=int, default=12, help="threshold is 2**-N")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    sp = run_speed(RunConfig(order=args.order, threshold=2.0 ** -args.threshold_exp))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "speed.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mode", "steps", "volume_evals", "coupling_evals", "wall_seconds", "linf_error"])
        for mode, r in sp.reports.items():
            w.writerow([mode, r.total_steps, r.volume_evaluations, r.coupling_evaluations,
                        f"{r.wall_time:.3f}", repr(r.error)])
    print(f"step ratio {sp.step_ratio:.3f}  evaluation ratio {sp.evaluation_ratio:.3f}  "
          f"wall ratio {sp.wall_ratio:.3f}")


if __name__ == "__main__":
    main()
