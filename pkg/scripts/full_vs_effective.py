"""Full three-level model against the two-mode beam splitter, lossless or lossy.

    python3 scripts/full_vs_effective.py --lossless --stark
"""

import argparse

from fluxem import config
from fluxem.analysis import compare_full_vs_effective
from fluxem.model import effective_params
from fluxem.solver import IntegratorConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="paper-fig2")
    ap.add_argument("--lossless", action="store_true", help="set every decay rate to zero")
    ap.add_argument("--stark", action="store_true", help="keep the Stark shifts in the effective model")
    ap.add_argument("--periods", type=float, default=1.0, help="horizon in full swap cycles (1/(2 lambda))")
    args = ap.parse_args()

    p = config.resolve(preset=args.preset).params
    if args.lossless:
        p = p.lossless()
    t_end = args.periods * 2 * effective_params(p).swap_time
    rep = compare_full_vs_effective(p, IntegratorConfig(t_end=t_end, sample_every=10), include_stark=args.stark)
    print(f"horizon {t_end:.4g} us, stark={args.stark}, lossless={args.lossless}")
    print(f"max |n_a full - eff| = {rep.max_dev_na:.4f}")
    print(f"max |n_b full - eff| = {rep.max_dev_nb:.4f}")


if __name__ == "__main__":
    main()
