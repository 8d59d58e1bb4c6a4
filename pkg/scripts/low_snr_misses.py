"""Count range-bin misses of the sparse and masked-FFT estimators against the weight.

A miss is a range estimate off the true bin. Used to study the low-SNR gap
between the two estimators.
"""

import argparse

from ncisac.config import default_config
from ncisac.estimators import estimate_range_jcmsa, estimate_range_masked2dfft
from ncisac.experiments import Scenario, draw, trial_seed
from ncisac.fista import FistaConfig
from ncisac.metrics import true_range_bin


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--snr-db", type=float, default=-20.0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--lambdas", type=float, nargs="+", default=[501, 1001, 2001, 3001, 4001, 5001, 5401])
    p.add_argument("--scenario", default="s1")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    cfg = default_config()
    mask = Scenario.parse(args.scenario).mask(cfg)
    target = true_range_bin(cfg)
    draws = [draw(cfg, mask, args.snr_db, trial_seed(args.seed, t))[1] for t in range(args.trials)]
    ff = sum(estimate_range_masked2dfft(m, mask, cfg).peak_bin != target for m in draws)
    print(f"masked_2dfft: {ff}/{args.trials} misses")
    for lam in args.lambdas:
        miss = sum(estimate_range_jcmsa(m, mask, cfg, FistaConfig(lam)).peak_bin != target for m in draws)
        print(f"jcmsa lambda {lam:g}: {miss}/{args.trials} misses", flush=True)


if __name__ == "__main__":
    main()
