"""Experiment drivers behind the command line: single runs, sweeps, tuning, tables.

Every driver is deterministic given its seed. Result files start with one
``# generated <timestamp>`` line followed by CSV; nothing else varies between
identical runs.
"""

from __future__ import annotations

import csv
import datetime as _dt
import enum
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ncisac.channel import TargetTruth, apply_mask, synthesize
from ncisac.config import DurationMode, SimulationConfig
from ncisac.estimators import (
    EstimationReport,
    NoDataError,
    estimate_plain_2dfft,
    estimate_range_jcmsa,
    estimate_range_masked2dfft,
    estimate_velocity_jcmsa,
    estimate_velocity_masked2dfft,
    save_spectrum_csv,
)
from ncisac.fista import FistaConfig
from ncisac.lambda_table import table_lambda
from ncisac.metrics import GainParams, gain_range, gain_velocity, resolution, rmse, rmse_bounds
from ncisac.occupancy import OccupancyMask, load_mask_csv, scenario1_mask, scenario2_mask
from ncisac.spectrum import Axis, Method
from ncisac.tuning import KcvOutcome, LambdaGrid, build_problem_set, kcv_select_lambda

CALIBRATION_KEY = 2**31  # spawn key of the tuning draw, disjoint from trial keys
DEFAULT_NOISE_VARS = (0.01, 0.1, 1.0, 10.0)
DEFAULT_FISTA_GAINS = (0.0, 1.0, 10.0)


class ScenarioKind(enum.Enum):
    S1 = "s1"
    S2 = "s2"
    FILE = "file"


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    path: Path | None = None

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        text = text.strip()
        if text.lower().startswith("file:"):
            path = text[5:]
            if not path:
                raise ValueError("file scenario needs a path: file:PATH")
            return cls(ScenarioKind.FILE, Path(path))
        try:
            return cls(ScenarioKind(text.lower()))
        except ValueError:
            raise ValueError(f"unknown scenario {text!r}; use s1, s2 or file:PATH") from None

    @property
    def label(self) -> str:
        return f"file:{self.path}" if self.kind is ScenarioKind.FILE else self.kind.value

    def mask(self, cfg: SimulationConfig) -> OccupancyMask:
        if self.kind is ScenarioKind.S1:
            return scenario1_mask(cfg)
        if self.kind is ScenarioKind.S2:
            return scenario2_mask(cfg)
        mask = load_mask_csv(self.path)
        if mask.shape != (cfg.n_subcarriers, cfg.n_symbols):
            raise ValueError(
                f"mask file {self.path} has shape {mask.shape}, config expects "
                f"({cfg.n_subcarriers}, {cfg.n_symbols})"
            )
        return mask


class LambdaSource(enum.Enum):
    FIXED = "fixed"
    TABLE = "table"
    TUNE = "tune"


@dataclass(frozen=True)
class LambdaSpec:
    source: LambdaSource
    range_lam: float | None = None
    velocity_lam: float | None = None

    @classmethod
    def parse(cls, text: str) -> "LambdaSpec":
        """``table``, ``tune``, ``VAL`` (both axes) or ``R,V``."""
        t = text.strip().lower()
        if t in ("table", "tune"):
            return cls(LambdaSource(t))
        parts = [p.strip() for p in t.split(",")]
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"bad --lambda value {text!r}; use VAL, R,V, table or tune") from None
        if len(vals) == 1:
            vals = vals * 2
        if len(vals) != 2 or any(not (math.isfinite(v) and v >= 0) for v in vals):
            raise ValueError(f"bad --lambda value {text!r}; need one or two non-negative numbers")
        return cls(LambdaSource.FIXED, vals[0], vals[1])

    @property
    def label(self) -> str:
        if self.source is LambdaSource.FIXED:
            return f"{self.range_lam!r},{self.velocity_lam!r}"
        return self.source.value


@dataclass(frozen=True)
class SweepSpec:
    snr_db_list: tuple[float, ...]
    trials: int
    scenario: Scenario
    methods: tuple[Method, ...]
    lambda_spec: LambdaSpec
    output_path: Path | None = None
    duration_mode: DurationMode | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.snr_db_list:
            raise ValueError("need at least one SNR")
        if not self.methods:
            raise ValueError("need at least one method")


def trial_seed(base: int, trial: int) -> np.random.SeedSequence:
    """Counter-based per-trial stream: trial k is reproducible on its own."""
    return np.random.SeedSequence(base, spawn_key=(trial,))


def calibration_seed(base: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(base, spawn_key=(CALIBRATION_KEY,))


def draw(cfg: SimulationConfig, mask: OccupancyMask, snr_db: float, seed):
    """(unprocessed, masked) channel matrices for one noise draw."""
    raw = synthesize(cfg, TargetTruth.from_config(cfg), snr_db, seed, mask=mask)
    return raw, apply_mask(raw, mask)


def tune_lambdas(
    cfg: SimulationConfig,
    mask: OccupancyMask,
    snr_db: float,
    seed,
    fista_cfg: FistaConfig = FistaConfig(),
    extended_velocity_grid: bool = True,
) -> tuple[float, float, KcvOutcome, KcvOutcome]:
    """Cross-validate both weights on one draw at ``snr_db``."""
    _, masked = draw(cfg, mask, snr_db, seed)
    out = []
    for axis in (Axis.RANGE, Axis.VELOCITY):
        problems = build_problem_set(masked, mask, cfg, axis)
        folds = min(cfg.kcv_folds, len(problems))
        grid = LambdaGrid.default(axis, extended_velocity_grid)
        out.append(kcv_select_lambda(problems, grid, folds, fista_cfg))
    return out[0].best_lambda, out[1].best_lambda, out[0], out[1]


def resolve_lambdas(
    spec: LambdaSpec, scenario: Scenario, cfg: SimulationConfig, mask: OccupancyMask, snr_db: float, seed: int
) -> tuple[float, float]:
    if spec.source is LambdaSource.FIXED:
        return spec.range_lam, spec.velocity_lam
    if spec.source is LambdaSource.TABLE:
        key = scenario.kind.value
        return table_lambda(key, Axis.RANGE, snr_db), table_lambda(key, Axis.VELOCITY, snr_db)
    lr, lv, _, _ = tune_lambdas(cfg, mask, snr_db, calibration_seed(seed))
    return lr, lv


def estimate_pair(
    method: Method,
    raw,
    masked,
    mask: OccupancyMask,
    cfg: SimulationConfig,
    lams: tuple[float, float],
    mode: DurationMode | None,
    fista_cfg: FistaConfig = FistaConfig(),
) -> tuple[EstimationReport, EstimationReport]:
    if method is Method.JCMSA:
        return (
            estimate_range_jcmsa(masked, mask, cfg, fista_cfg.with_lam(lams[0])),
            estimate_velocity_jcmsa(masked, mask, cfg, fista_cfg.with_lam(lams[1]), mode),
        )
    if method is Method.MASKED_2DFFT:
        return (
            estimate_range_masked2dfft(masked, mask, cfg),
            estimate_velocity_masked2dfft(masked, mask, cfg, mode),
        )
    return estimate_plain_2dfft(raw, cfg, mode)


def run_estimate(
    cfg: SimulationConfig,
    scenario: Scenario,
    snr_db: float,
    method: Method,
    lambda_spec: LambdaSpec,
    seed: int,
    mode: DurationMode | None = None,
) -> tuple[EstimationReport, EstimationReport, tuple[float, float]]:
    """Mask, synthesize, mask the matrix and estimate; returns both reports and the weights used."""
    mask = scenario.mask(cfg)
    lams = resolve_lambdas(lambda_spec, scenario, cfg, mask, snr_db, seed)
    raw, masked = draw(cfg, mask, snr_db, trial_seed(seed, 0))
    try:
        r, v = estimate_pair(method, raw, masked, mask, cfg, lams, mode)
    except NoDataError as exc:
        raise NoDataError(
            f"{method.value} at {snr_db} dB with lambda (range, velocity) = {lams}: {exc}"
        ) from exc
    return r, v, lams


# ---- output helpers --------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return repr(float(x))  # plain repr also for numpy scalars
    return str(x)


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return fmt(x)
    return x


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_result(path: Path | str | None, header: list[str], rows: list[list], json_path=None) -> str:
    """Write timestamp line + CSV (to ``path`` or return it) and an optional JSON mirror."""
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    text = f"# generated {stamp}\n" + render_csv(header, rows)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    if json_path is not None:
        records = [{k: _json_safe(v) for k, v in zip(header, row)} for row in rows]
        Path(json_path).write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    return text


ESTIMATE_HEADER = [
    "axis", "method", "estimate", "peak_bin", "psr_db", "solver_iters_total", "contributing", "lambda",
]


def estimate_rows(reports, lams) -> list[list]:
    rows = []
    for rep, lam in zip(reports, lams):
        rows.append(
            [rep.axis.value, rep.method.value, float(rep.estimate), rep.peak_bin, float(rep.psr_db),
             rep.solver_iters_total, rep.spectrum.contributing,
             float(lam) if rep.method is Method.JCMSA else ""]
        )
    return rows


def emit_spectra(reports, cfg: SimulationConfig, directory: Path, tag: str, mode=None) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        save_spectrum_csv(rep, cfg, directory / f"{tag}_{rep.axis.value}.csv", mode)


# ---- sweep -----------------------------------------------------------------

SWEEP_HEADER = [
    "snr_db", "method", "trials", "misses",
    "rmse_range_m", "rmse_velocity_mps",
    "mean_psr_range_db", "inf_psr_range_frac", "mean_psr_velocity_db", "inf_psr_velocity_frac",
    "mean_iters_range", "mean_iters_velocity", "lambda_range", "lambda_velocity",
]


@dataclass
class _Acc:
    r_est: list = field(default_factory=list)
    v_est: list = field(default_factory=list)
    r_psr: list = field(default_factory=list)
    v_psr: list = field(default_factory=list)
    r_it: list = field(default_factory=list)
    v_it: list = field(default_factory=list)
    misses: int = 0


def _psr_summary(values: list[float]) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    finite = [p for p in values if math.isfinite(p)]
    inf_frac = 1.0 - len(finite) / len(values)
    return (float(np.mean(finite)) if finite else math.inf), inf_frac


def run_sweep(
    spec: SweepSpec,
    cfg: SimulationConfig,
    seed: int,
    json_path=None,
    spectra_dir: Path | None = None,
    fista_cfg: FistaConfig = FistaConfig(),
) -> list[list]:
    """Monte-Carlo RMSE per (snr, method).

    Trial k uses the same noise draw for every SNR and method, so methods are
    compared on identical inputs. Runs where an estimator finds no data (for
    instance a weight large enough to zero the spectrum) are charged the
    worst-case bin error and counted in ``misses``.
    """
    mode = spec.duration_mode
    mask = spec.scenario.mask(cfg)
    bounds = rmse_bounds(cfg, mode)
    worst_r = cfg.target_range_m + bounds.range_upper
    worst_v = cfg.target_velocity_mps + bounds.velocity_upper
    rows = []
    for snr in sorted(spec.snr_db_list):
        lams = resolve_lambdas(spec.lambda_spec, spec.scenario, cfg, mask, snr, seed)
        acc = {m: _Acc() for m in spec.methods}
        for trial in range(spec.trials):
            raw, masked = draw(cfg, mask, snr, trial_seed(seed, trial))
            for method in spec.methods:
                a = acc[method]
                try:
                    r, v = estimate_pair(method, raw, masked, mask, cfg, lams, mode, fista_cfg)
                except NoDataError:
                    a.misses += 1
                    a.r_est.append(worst_r)
                    a.v_est.append(worst_v)
                    continue
                a.r_est.append(r.estimate)
                a.v_est.append(v.estimate)
                a.r_psr.append(r.psr_db)
                a.v_psr.append(v.psr_db)
                a.r_it.append(r.solver_iters_total)
                a.v_it.append(v.solver_iters_total)
                if spectra_dir is not None and trial == 0:
                    emit_spectra((r, v), cfg, spectra_dir, f"{method.value}_snr{snr:g}", mode)
        for method in spec.methods:
            a = acc[method]
            psr_r, inf_r = _psr_summary(a.r_psr)
            psr_v, inf_v = _psr_summary(a.v_psr)
            jc = method is Method.JCMSA
            rows.append(
                [float(snr), method.value, spec.trials, a.misses,
                 rmse(a.r_est, cfg.target_range_m), rmse(a.v_est, cfg.target_velocity_mps),
                 psr_r, inf_r, psr_v, inf_v,
                 float(np.mean(a.r_it)) if a.r_it else math.nan,
                 float(np.mean(a.v_it)) if a.v_it else math.nan,
                 float(lams[0]) if jc else "", float(lams[1]) if jc else ""]
            )
    if spec.output_path is not None or json_path is not None:
        write_result(spec.output_path, SWEEP_HEADER, rows, json_path)
    return rows


# ---- tables ----------------------------------------------------------------

TABLES_HEADER = ["section", "quantity", "method", "duration_mode", "noise_var", "fista_gain", "value"]


def run_tables(
    cfg: SimulationConfig,
    noise_vars=DEFAULT_NOISE_VARS,
    fista_gains=DEFAULT_FISTA_GAINS,
    bounds_only: bool = False,
) -> list[list]:
    """Resolutions, RMSE bounds under both duration modes, and the SNR-gain grid."""
    rows = []
    modes = (DurationMode.SYMBOL_TOTAL, DurationMode.ELEMENTARY)
    if not bounds_only:
        for method in Method:
            for mode in modes:
                dr, dv = resolution(cfg, method, mode)
                rows.append(["resolution", "range_m", method.value, mode.value, "", "", dr])
                rows.append(["resolution", "velocity_mps", method.value, mode.value, "", "", dv])
    for mode in modes:
        b = rmse_bounds(cfg, mode)
        rows.append(["bound", "range_upper_m", "", mode.value, "", "", b.range_upper])
        rows.append(["bound", "range_lower_m", "", mode.value, "", "", b.range_lower])
        rows.append(["bound", "velocity_upper_mps", "", mode.value, "", "", b.velocity_upper])
        rows.append(["bound", "velocity_lower_mps", "", mode.value, "", "", b.velocity_lower])
    if not bounds_only:
        for s2 in noise_vars:
            for w in fista_gains:
                p = GainParams.from_config(cfg, float(s2), float(w))
                for method in Method:
                    rows.append(["gain", "range", method.value, "", float(s2), float(w), gain_range(p, method)])
                    rows.append(["gain", "velocity", method.value, "", float(s2), float(w), gain_velocity(p, method)])
    return rows
