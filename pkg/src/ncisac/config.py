"""Experiment parameters, validation and the flat ``key = value`` file format."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Iterable


class DurationMode(enum.Enum):
    """Which symbol duration converts a Doppler bin into a velocity."""

    SYMBOL_TOTAL = "symbol"  # T_ofdm + T_cp
    ELEMENTARY = "elementary"  # T_ofdm only


@dataclass(frozen=True)
class SimulationConfig:
    n_subcarriers: int = 512
    n_occupied: int = 256
    n_symbols: int = 14
    carrier_freq_hz: float = 24e9
    subcarrier_spacing_hz: float = 15e3
    elementary_symbol_s: float = 66.67e-6
    cp_length_s: float = 16.67e-6
    symbol_duration_s: float = 83.34e-6
    target_range_m: float = 117.0
    target_velocity_mps: float = 13.0
    light_speed_mps: float = 3.0e8
    kcv_folds: int = 14
    rng_seed: int = 0
    velocity_duration_mode: DurationMode = DurationMode.SYMBOL_TOTAL

    @property
    def range_bin_m(self) -> float:
        """Range spanned by one bin of an N_c-point transform."""
        return self.light_speed_mps / (2.0 * self.n_subcarriers * self.subcarrier_spacing_hz)

    @property
    def unambiguous_range_m(self) -> float:
        return self.light_speed_mps / (2.0 * self.subcarrier_spacing_hz)

    def velocity_duration_s(self, mode: DurationMode | None = None) -> float:
        mode = self.velocity_duration_mode if mode is None else mode
        if mode is DurationMode.ELEMENTARY:
            return self.elementary_symbol_s
        return self.symbol_duration_s

    def velocity_bin_mps(self, mode: DurationMode | None = None) -> float:
        """Velocity spanned by one bin of an M_sym-point transform."""
        return self.light_speed_mps / (
            2.0 * self.n_symbols * self.velocity_duration_s(mode) * self.carrier_freq_hz
        )


@dataclass(frozen=True)
class ValidationOutcome:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


class ConfigError(ValueError):
    """Malformed configuration text: bad syntax, unknown key or unparsable value."""


class ConfigValidationError(ValueError):
    """A parsed configuration violates one or more invariants."""

    def __init__(self, violations: Iterable[str]):
        self.violations = tuple(violations)
        super().__init__("invalid configuration: " + "; ".join(self.violations))


FIELD_TYPES = {f.name: f.type for f in fields(SimulationConfig)}
_INT_FIELDS = {"n_subcarriers", "n_occupied", "n_symbols", "kcv_folds", "rng_seed"}


def default_config() -> SimulationConfig:
    return SimulationConfig()


def validate_config(cfg: SimulationConfig) -> ValidationOutcome:
    """Check every invariant and report each violated one by name."""
    bad: list[str] = []
    for name in ("n_subcarriers", "n_occupied", "n_symbols", "kcv_folds"):
        if getattr(cfg, name) < 1:
            bad.append(f"{name} > 0")
    for name in (
        "carrier_freq_hz",
        "subcarrier_spacing_hz",
        "elementary_symbol_s",
        "symbol_duration_s",
        "light_speed_mps",
    ):
        value = getattr(cfg, name)
        if not (math.isfinite(value) and value > 0):
            bad.append(f"{name} > 0")
    if not (math.isfinite(cfg.cp_length_s) and cfg.cp_length_s >= 0):
        bad.append("cp_length_s ≥ 0")
    if not (math.isfinite(cfg.target_range_m) and cfg.target_range_m >= 0):
        bad.append("target_range_m ≥ 0")
    if not math.isfinite(cfg.target_velocity_mps):
        bad.append("target_velocity_mps finite")
    if not 0 <= cfg.rng_seed < 2**64:
        bad.append("rng_seed fits in 64 unsigned bits")
    if not isinstance(cfg.velocity_duration_mode, DurationMode):
        bad.append("velocity_duration_mode is a DurationMode")

    if cfg.n_occupied > cfg.n_subcarriers:
        bad.append("n_occupied ≤ n_subcarriers")
    total = cfg.elementary_symbol_s + cfg.cp_length_s
    if not math.isclose(cfg.symbol_duration_s, total, rel_tol=1e-9, abs_tol=0.0):
        bad.append("symbol_duration_s = elementary_symbol_s + cp_length_s")
    if cfg.kcv_folds > cfg.n_symbols:
        bad.append("kcv_folds ≤ n_symbols")
    if cfg.subcarrier_spacing_hz > 0 and cfg.light_speed_mps > 0:
        if cfg.target_range_m >= cfg.unambiguous_range_m:
            bad.append("target_range_m below unambiguous range c/(2·Δf)")
    return ValidationOutcome(tuple(bad))


def parse_value(key: str, text: str):
    """Convert the text of one config value to the type of field ``key``."""
    text = text.strip()
    if key == "velocity_duration_mode":
        lowered = text.lower()
        for mode in DurationMode:
            if lowered in (mode.value, mode.name.lower()):
                return mode
        raise ValueError(f"expected one of {[m.value for m in DurationMode]}, got {text!r}")
    if key in _INT_FIELDS:
        return int(text, 0)
    return float(text)


def parse_assignments(lines: Iterable[str], source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are fatal."""
    values: dict = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, text = (part.strip() for part in line.split("=", 1))
        if key not in FIELD_TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = parse_value(key, text)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def apply_overrides(cfg: SimulationConfig, assignments: Iterable[str]) -> SimulationConfig:
    """Apply ``key=value`` overrides (the CLI's ``--set``) and re-validate."""
    values = parse_assignments(assignments, source="--set")
    out = replace(cfg, **values)
    outcome = validate_config(out)
    if not outcome:
        raise ConfigValidationError(outcome.violations)
    return out


def load_config(path: str | Path) -> SimulationConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    values = parse_assignments(text.splitlines(), source=str(path))
    cfg = replace(default_config(), **values)
    outcome = validate_config(cfg)
    if not outcome:
        raise ConfigValidationError(outcome.violations)
    return cfg


def format_config(cfg: SimulationConfig) -> str:
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, DurationMode):
            text = value.value
        elif isinstance(value, float):
            text = repr(value)  # shortest repr round-trips exactly
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def save_config(cfg: SimulationConfig, path: str | Path) -> None:
    Path(path).write_text(format_config(cfg), encoding="utf-8")
