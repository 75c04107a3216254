"""Photon-to-phonon transfer on the paper-fig2 preset.

Writes t, P0, P1, P2, <a^+a>, <b^+b> to a CSV and prints the headline numbers.

    python3 scripts/fig2_transfer.py --out fig2.csv
"""

import argparse
import time

from fluxem import config
from fluxem.analysis import run_transfer, swap_time_estimate, transfer_result
from fluxem.cli import csv_line
from fluxem.model import effective_params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="paper-fig2")
    ap.add_argument("--out", default="fig2.csv")
    args = ap.parse_args()

    sc = config.resolve(preset=args.preset)
    start = time.perf_counter()
    traj = run_transfer(sc.params, sc.integrator, sc.initial_state)
    elapsed = time.perf_counter() - start

    names = ["P0", "P1", "P2", "n_a", "n_b"]
    with open(args.out, "w", newline="") as fh:
        fh.write(csv_line(["t_us", *names]))
        for i, t in enumerate(traj.times):
            fh.write(csv_line([t, *(traj[n][i] for n in names)]))

    r = transfer_result(traj)
    print(f"lambda          {effective_params(sc.params).lambda_eff:.6g} MHz")
    print(f"expected swap   {effective_params(sc.params).swap_time:.6g} us")
    print(f"measured swap   {swap_time_estimate(traj):.6g} us")
    print(r.summary())
    print(f"runtime         {elapsed:.2f} s, {len(traj)} samples -> {args.out}")


if __name__ == "__main__":
    main()
