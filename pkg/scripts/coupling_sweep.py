"""Effective coupling and transfer efficiency against drive strength.

Effective-model quantities are cheap; ``--full`` also integrates the master
equation per point (about 2 s each on the default grid).

    python3 scripts/coupling_sweep.py --full --workers 4 --out omega_sweep.csv
"""

import argparse

import numpy as np

from fluxem import config
from fluxem.cli import csv_line, sweep_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="paper-fig2")
    ap.add_argument("--omega", default="16:128:8", help="start:stop:count in MHz")
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="omega_sweep.csv")
    args = ap.parse_args()

    start, stop, count = args.omega.split(":")
    grid = [float(v) for v in np.linspace(float(start), float(stop), int(count))]
    sc = config.resolve(preset=args.preset)
    rows = sweep_rows(sc, [("Omega", grid)], full=args.full, workers=args.workers)

    columns = ["Omega", "lambda_eff", "ratio_drive"] + (["peak_nb"] if args.full else [])
    with open(args.out, "w", newline="") as fh:
        fh.write(csv_line(columns))
        for row in rows:
            fh.write(csv_line([row.get(c, "") for c in columns]))
    for row in rows:
        print("  ".join(f"{c}={row.get(c, float('nan')):.4g}" for c in columns))


if __name__ == "__main__":
    main()
