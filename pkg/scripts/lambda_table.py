"""Re-derive the per-SNR weight table by K-fold selection on calibration draws.

Prints one row per SNR. Compare with ncisac.lambda_table.LAMBDA_TABLE; exact
agreement is not expected since the calibration draws are random.
"""

import argparse

from ncisac.config import default_config
from ncisac.experiments import Scenario, calibration_seed, tune_lambdas


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--snr-db", type=float, nargs="+", default=list(range(0, 11)))
    p.add_argument("--scenario", default="s1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--literal-velocity-grid", action="store_true")
    args = p.parse_args()

    cfg = default_config()
    mask = Scenario.parse(args.scenario).mask(cfg)
    print("snr_db,lambda_range,lambda_velocity")
    for snr in args.snr_db:
        lr, lv, _, _ = tune_lambdas(
            cfg, mask, snr, calibration_seed(args.seed), extended_velocity_grid=not args.literal_velocity_grid
        )
        print(f"{snr:g},{lr:g},{lv:g}", flush=True)


if __name__ == "__main__":
    main()
