"""Command line: ``ncisac {estimate,sweep,tune,tables}``.

Negative SNRs can be given space separated (``--snr-db -30 -20``) or as one
comma list with ``=`` (``--snr-db=-30,-20``).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ncisac.config import (
    ConfigError,
    ConfigValidationError,
    DurationMode,
    apply_overrides,
    default_config,
    load_config,
    validate_config,
)
from ncisac.estimators import NoDataError
from ncisac.experiments import (
    ESTIMATE_HEADER,
    SWEEP_HEADER,
    TABLES_HEADER,
    LambdaSpec,
    Scenario,
    SweepSpec,
    calibration_seed,
    emit_spectra,
    estimate_rows,
    render_csv,
    run_estimate,
    run_sweep,
    run_tables,
    tune_lambdas,
    write_result,
)
from ncisac.spectrum import Method

TUNE_HEADER = ["axis", "lambda", "fold", "error", "iterations", "residual", "score"]


def _float_list(values: list[str]) -> list[float]:
    out = []
    for v in values:
        out.extend(float(p) for p in v.split(",") if p.strip())
    return out


def _methods(values: list[str]) -> list[Method]:
    out = []
    for v in values:
        for p in v.split(","):
            p = p.strip().lower()
            if p:
                try:
                    out.append(Method(p))
                except ValueError:
                    names = ", ".join(m.value for m in Method)
                    raise argparse.ArgumentTypeError(f"unknown method {p!r}; choose from {names}") from None
    return list(dict.fromkeys(out))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value parameter file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one parameter")
    common.add_argument("--seed", type=int, help="base seed (default: rng_seed from the config)")
    common.add_argument("--duration-mode", choices=[m.value for m in DurationMode], help="velocity bin duration")
    common.add_argument("--out", type=Path, help="result CSV (default: stdout)")
    common.add_argument("--json", type=Path, help="also write the rows as JSON here")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--scenario", default="s1", help="s1, s2 or file:PATH to a 0/1 mask CSV")

    p = argparse.ArgumentParser(prog="ncisac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", parents=[common, scen], help="one draw, one estimate per method")
    e.add_argument("--snr-db", type=float, default=10.0)
    e.add_argument("--method", nargs="+", default=["jcmsa"])
    e.add_argument("--lambda", dest="lam", default="table", help="VAL, R,V, table or tune")
    e.add_argument("--emit-spectra", action="store_true", help="write per-axis spectra CSVs")

    s = sub.add_parser("sweep", parents=[common, scen], help="Monte-Carlo RMSE against SNR")
    s.add_argument("--snr-db", nargs="+", default=["-30,-20,-10,0,10"])
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--method", nargs="+", default=["jcmsa,masked_2dfft,plain_2dfft"])
    s.add_argument("--lambda", dest="lam", default="table", help="VAL, R,V, table or tune")
    s.add_argument("--emit-spectra", action="store_true", help="spectra of trial 0 per (snr, method)")

    t = sub.add_parser("tune", parents=[common, scen], help="K-fold selection of both weights")
    t.add_argument("--snr-db", type=float, default=10.0)
    t.add_argument("--literal-velocity-grid", action="store_true", help="velocity grid [1, 5] instead of [0.02, 5]")

    b = sub.add_parser("tables", parents=[common], help="resolutions, RMSE bounds and SNR gains")
    b.add_argument("--noise-vars", nargs="*", default=["0.01,0.1,1,10"])
    b.add_argument("--fista-gains", nargs="*", default=["0,1,10"])
    b.add_argument("--bounds-only", action="store_true")
    return p


def _load_cfg(args):
    cfg = load_config(args.config) if args.config else default_config()
    cfg = apply_overrides(cfg, args.set)
    outcome = validate_config(cfg)
    if not outcome.ok:
        raise ConfigValidationError(outcome.violations)
    return cfg


def _emit(args, header, rows) -> None:
    text = write_result(args.out, header, rows, args.json)
    if args.out is None:
        sys.stdout.write(text)


def _spectra_dir(args) -> Path:
    if args.out is None:
        return Path("spectra")
    return args.out.parent / f"{args.out.stem}_spectra"


def cmd_estimate(args, cfg, seed, mode) -> None:
    scenario = Scenario.parse(args.scenario)
    spec = LambdaSpec.parse(args.lam)
    rows = []
    for method in _methods(args.method):
        r, v, lams = run_estimate(cfg, scenario, args.snr_db, method, spec, seed, mode)
        rows.extend(estimate_rows((r, v), lams))
        if args.emit_spectra:
            emit_spectra((r, v), cfg, _spectra_dir(args), method.value, mode)
    _emit(args, ESTIMATE_HEADER, rows)


def cmd_sweep(args, cfg, seed, mode) -> None:
    spec = SweepSpec(
        snr_db_list=tuple(_float_list(args.snr_db)),
        trials=args.trials,
        scenario=Scenario.parse(args.scenario),
        methods=tuple(_methods(args.method)),
        lambda_spec=LambdaSpec.parse(args.lam),
        output_path=args.out,
        duration_mode=mode,
    )
    rows = run_sweep(spec, cfg, seed, args.json, _spectra_dir(args) if args.emit_spectra else None)
    if args.out is None:
        sys.stdout.write(render_csv(SWEEP_HEADER, rows))


def cmd_tune(args, cfg, seed, mode) -> None:
    mask = Scenario.parse(args.scenario).mask(cfg)
    lr, lv, out_r, out_v = tune_lambdas(
        cfg, mask, args.snr_db, calibration_seed(seed), extended_velocity_grid=not args.literal_velocity_grid
    )
    rows = []
    for axis, o in (("range", out_r), ("velocity", out_v)):
        for li, lam in enumerate(o.lambdas):
            for f in range(o.per_fold_errors.shape[1]):
                rows.append([axis, float(lam), f, float(o.per_fold_errors[li, f]),
                             float(o.per_fold_iters[li, f]), float(o.per_fold_residuals[li, f]), ""])
            rows.append([axis, float(lam), "all", float(o.per_fold_errors[li].mean()),
                         float(o.per_fold_iters[li].mean()), float(o.per_fold_residuals[li].mean()),
                         float(o.scores[li])])
    _emit(args, TUNE_HEADER, rows)
    print(f"best lambda: range {lr!r}, velocity {lv!r}", file=sys.stderr)


def cmd_tables(args, cfg, seed, mode) -> None:
    rows = run_tables(cfg, _float_list(args.noise_vars), _float_list(args.fista_gains), args.bounds_only)
    _emit(args, TABLES_HEADER, rows)


COMMANDS = {"estimate": cmd_estimate, "sweep": cmd_sweep, "tune": cmd_tune, "tables": cmd_tables}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_cfg(args)
        seed = cfg.rng_seed if args.seed is None else args.seed
        mode = DurationMode(args.duration_mode) if args.duration_mode else None
        COMMANDS[args.command](args, cfg, seed, mode)
    except (ConfigError, ConfigValidationError, NoDataError, ValueError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"ncisac {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
