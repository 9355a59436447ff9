"""Monte-Carlo experiment harness: seeded paired trials over a sweep axis,
summary rows, a flat key=value config format, and deterministic CSV output.

Each trial simulates two frames: the first builds the prior support, the
second is measured. Trial t always uses seed base_seed + t, for every
algorithm and sweep value, so comparisons are paired.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError
from .mimo import ALGORITHMS, MimoScenario, run_frame_sequence
from .sparsity import SupportEvolutionParams

__all__ = [
    "SWEEP_AXES",
    "GAMMA_RULES",
    "ExperimentConfig",
    "ResultRow",
    "load_config",
    "run_sweep",
    "run_mismatch",
    "rows_to_csv_text",
    "write_csv",
]

SWEEP_AXES = ("pilot_length", "snr_db", "s_c", "believed_s_c")
GAMMA_RULES = ("sqrt_2nt", "explicit")

CSV_COLUMNS = ("sweep_axis", "sweep_value", "algorithm", "nmse", "nmse_median",
               "nmse_ci95_halfwidth", "mean_iterations",
               "support_recovery_rate", "n_trials", "base_seed")

N_FRAMES = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Scenario dimensions plus sweep and trial bookkeeping."""

    M: int
    N_ue: int
    s_bar: int
    s_c: int
    pilot_length: int
    snr_db: float
    sweep_axis: str
    sweep_values: tuple
    algorithms: tuple[str, ...]
    n_trials: int = 100
    base_seed: int = 0
    gamma_rule: str = "sqrt_2nt"
    gamma_value: Optional[float] = None
    true_overlap: Optional[int] = None

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ConfigError("M must be positive")
        if self.N_ue < 1:
            raise ConfigError("N_ue must be positive")
        if self.s_bar < 1:
            raise ConfigError("s_bar must be positive")
        if self.s_c < 0:
            raise ConfigError("s_c must be nonnegative")
        if self.pilot_length < 1:
            raise ConfigError("pilot_length must be positive")
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(
                f"sweep_axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must be nonempty")
        if not self.algorithms:
            raise ConfigError("algorithms must be nonempty")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ConfigError(
                    f"algorithms entry {alg!r} not one of {ALGORITHMS}")
        if self.n_trials < 1:
            raise ConfigError("n_trials must be positive")
        if self.gamma_rule not in GAMMA_RULES:
            raise ConfigError(
                f"gamma_rule must be one of {GAMMA_RULES}, got {self.gamma_rule!r}")
        if self.gamma_rule == "explicit" and (self.gamma_value is None
                                              or self.gamma_value < 0):
            raise ConfigError(
                "gamma_value must be a nonnegative number when gamma_rule=explicit")
        if self.true_overlap is not None and self.true_overlap < 0:
            raise ConfigError("true_overlap must be nonnegative")


@dataclass(frozen=True)
class ResultRow:
    """One (sweep value, algorithm) summary over n_trials paired trials."""

    sweep_axis: str
    sweep_value: float
    algorithm: str
    nmse: float
    nmse_median: float
    nmse_ci95_halfwidth: float
    mean_iterations: float
    support_recovery_rate: float
    n_trials: int
    base_seed: int


_INT_KEYS = ("M", "N_ue", "s_bar", "s_c", "pilot_length", "n_trials",
             "base_seed", "true_overlap")
_FLOAT_KEYS = ("snr_db", "gamma_value")
_STR_KEYS = ("sweep_axis", "gamma_rule")
_LIST_KEYS = ("sweep_values", "algorithms")
_ALL_KEYS = _INT_KEYS + _FLOAT_KEYS + _STR_KEYS + _LIST_KEYS
_REQUIRED = ("M", "N_ue", "s_bar", "s_c", "pilot_length", "snr_db",
             "sweep_axis", "sweep_values", "algorithms")


def _parse_number(text: str, key: str, want_int: bool):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {text!r}") from None
    if want_int:
        if not value.is_integer():
            raise ConfigError(f"{key} must be an integer, got {text!r}")
        return int(value)
    return value


def load_config(path) -> ExperimentConfig:
    """Parse a key=value config file; # starts a comment, blank lines are
    ignored, unknown keys raise ConfigError."""
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _ALL_KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in raw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = value

    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    fields: dict = {}
    for key in _INT_KEYS:
        if key in raw:
            fields[key] = _parse_number(raw[key], key, want_int=True)
    for key in _FLOAT_KEYS:
        if key in raw:
            fields[key] = _parse_number(raw[key], key, want_int=False)
    for key in _STR_KEYS:
        if key in raw:
            fields[key] = raw[key]
    if "algorithms" in raw:
        fields["algorithms"] = tuple(
            s.strip() for s in raw["algorithms"].split(",") if s.strip())
    axis = fields.get("sweep_axis", "")
    values_want_int = axis != "snr_db"
    if "sweep_values" in raw:
        parts = [s.strip() for s in raw["sweep_values"].split(",") if s.strip()]
        if not parts:
            raise ConfigError("sweep_values must be nonempty")
        fields["sweep_values"] = tuple(
            _parse_number(p, "sweep_values", want_int=values_want_int)
            for p in parts)
    return ExperimentConfig(**fields)


def _scenario_at(config: ExperimentConfig, value) -> MimoScenario:
    """Scenario for one sweep point (believed_s_c never changes the data)."""
    t = config.pilot_length
    snr_db = config.snr_db
    s_c = config.s_c
    if config.sweep_axis == "pilot_length":
        t = int(value)
    elif config.sweep_axis == "snr_db":
        snr_db = float(value)
    elif config.sweep_axis == "s_c":
        s_c = int(value)
    evolution = SupportEvolutionParams(s_bar=config.s_bar, s_c=s_c, K=config.M)
    return MimoScenario(M=config.M, N_ue=config.N_ue, T=t,
                        P=10.0 ** (snr_db / 10.0), s_bar=config.s_bar,
                        evolution=evolution)


def _gamma_for(config: ExperimentConfig) -> Optional[float]:
    # None lets the harness apply the sqrt(2 N T) rule per scenario
    return None if config.gamma_rule == "sqrt_2nt" else config.gamma_value


def _summary_row(config: ExperimentConfig, value, algorithm: str,
                 ratios, iters, hits) -> ResultRow:
    n = len(ratios)
    ci = 0.0
    if n > 1:
        ci = 1.96 * float(np.std(ratios, ddof=1)) / math.sqrt(n)
    return ResultRow(
        sweep_axis=config.sweep_axis, sweep_value=value,
        algorithm=algorithm, nmse=float(np.mean(ratios)),
        nmse_median=float(np.median(ratios)), nmse_ci95_halfwidth=ci,
        mean_iterations=float(np.mean(iters)),
        support_recovery_rate=float(np.mean(hits)),
        n_trials=n, base_seed=config.base_seed)


def _collect(config: ExperimentConfig, value, algorithm: str,
             scenario: MimoScenario, believed_s_c: Optional[int],
             fixed_overlap: Optional[int], noise: bool) -> ResultRow:
    gamma = _gamma_for(config)
    ratios, iters, hits = [], [], []
    for trial in range(config.n_trials):
        rng = np.random.default_rng(config.base_seed + trial)
        records = run_frame_sequence(
            scenario, N_FRAMES, algorithm, rng, gamma=gamma, noise=noise,
            believed_s_c=believed_s_c, fixed_overlap=fixed_overlap)
        last = records[-1]
        ratios.append(last.nmse_ratio)
        iters.append(last.iterations)
        hits.append(1.0 if last.support_exact else 0.0)
    return _summary_row(config, value, algorithm, ratios, iters, hits)


def run_sweep(config: ExperimentConfig, noise: bool = True) -> list[ResultRow]:
    """Run the sweep described by config; rows come out in (sweep value,
    algorithm) order."""
    if config.sweep_axis == "believed_s_c":
        raise ConfigError("sweep_axis believed_s_c runs through run_mismatch")
    rows = []
    for value in config.sweep_values:
        scenario = _scenario_at(config, value)
        believed = int(value) if config.sweep_axis == "s_c" else None
        for algorithm in config.algorithms:
            rows.append(_collect(config, value, algorithm, scenario,
                                 believed_s_c=believed, fixed_overlap=None,
                                 noise=noise))
    return rows


def run_mismatch(config: ExperimentConfig, noise: bool = True) -> list[ResultRow]:
    """Sweep the believed s_c while the true consecutive overlap stays
    pinned at config.true_overlap; the generated data never changes across
    sweep values, only what the algorithms are told."""
    if config.sweep_axis != "believed_s_c":
        raise ConfigError("run_mismatch needs sweep_axis = believed_s_c")
    if config.true_overlap is None:
        raise ConfigError("true_overlap is required for a mismatch sweep")
    if config.true_overlap > config.s_bar - 2:
        raise ConfigError(
            f"true_overlap must be <= s_bar - 2 = {config.s_bar - 2}")
    base = replace(config, s_c=config.true_overlap)
    scenario = _scenario_at(base, None)
    rows = []
    for value in config.sweep_values:
        believed = int(value)
        if believed < 0:
            raise ConfigError("believed s_c values must be nonnegative")
        for algorithm in config.algorithms:
            rows.append(_collect(config, value, algorithm, scenario,
                                 believed_s_c=believed,
                                 fixed_overlap=config.true_overlap,
                                 noise=noise))
    return rows


def _format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".9g")
    return str(v)


def rows_to_csv_text(rows) -> str:
    """Render rows as CSV text: one header row, 9 significant digits."""
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(_format_value(getattr(r, col))
                              for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv_text(rows))
