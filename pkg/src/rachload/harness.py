"""Monte Carlo experiment harness: sweep true loads, estimate, score.

A run sweeps every (n_high, n_low, T) point of its configuration, samples
``trials`` independent observation sets per point, runs the configured
estimators on each, and records per-trial absolute errors and wall-clock
runtimes. Records are emitted as CSV with a fixed column order; a mean
absolute error summary grouped by (estimator, true counts, T) accompanies
them for plotting.

Runs are reproducible: records (runtimes aside) depend only on the
configuration and seed, never on execution order or worker count, because
every point derives its own random substreams.
"""

from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

from .estimators import HypothesisGrid, ml_estimate, rcml_estimate
from .model import LoadHypothesis, SelectionProfile
from .simulate import SimulationSeed, sample_observations

ESTIMATOR_FUNCS = {"ml": ml_estimate, "rcml": rcml_estimate}

DEFAULT_GROUP_KEYS = ("estimator", "n_high_true", "n_low_true", "t")

SETUP_IDS = ("1", "2", "3", "custom")

_PRESET_M = 6
_PRESET_T_VALUES = (1, 3, 10)
_PRESET_N_LOW_RANGE = (0, 7)
_SETUP2_P_LOW = (1 / 3, 1 / 3, 1 / 3, 0.0, 0.0, 0.0)
_SETUP3_P_HIGH = (1 / 12, 1 / 12, 2 / 12, 2 / 12, 3 / 12, 3 / 12)
_SETUP3_P_LOW = (4 / 12, 3 / 12, 2 / 12, 1 / 12, 1 / 12, 1 / 12)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; see :func:`preset_config` for the presets."""

    setup_id: str
    m: int
    t_values: tuple[int, ...]
    n_high_values: tuple[int, ...]
    n_low_range: tuple[int, int]
    profile: SelectionProfile
    trials: int = 50
    seed: int = 20260815
    estimators: tuple[str, ...] = ("ml", "rcml")
    grid_max_high: int | None = None
    grid_max_low: int | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.setup_id not in SETUP_IDS:
            raise ValueError(f"setup_id must be one of {SETUP_IDS}")
        if self.m != self.profile.num_rbs:
            raise ValueError("m must match the profile's RB count")
        if not self.t_values or any(t < 1 for t in self.t_values):
            raise ValueError("t_values must be positive slot counts")
        if not self.n_high_values or any(n < 0 for n in self.n_high_values):
            raise ValueError("n_high_values must be non-negative")
        lo, hi = self.n_low_range
        if lo < 0 or hi < lo:
            raise ValueError("n_low_range must be a non-empty inclusive range")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        unknown = set(self.estimators) - set(ESTIMATOR_FUNCS)
        if not self.estimators or unknown:
            raise ValueError(f"estimators must be a non-empty subset of {tuple(ESTIMATOR_FUNCS)}")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    @property
    def n_low_values(self) -> tuple[int, ...]:
        lo, hi = self.n_low_range
        return tuple(range(lo, hi + 1))

    @property
    def grid(self) -> HypothesisGrid:
        """Search grid; defaults to the swept load ranges unless overridden.

        Experiment runs score estimators over the load ranges they sweep, so
        the hypothesis space matches the design space of the run. Ad-hoc
        estimation keeps the wider library default instead.
        """
        return HypothesisGrid(
            self.grid_max_high if self.grid_max_high is not None else max(self.n_high_values),
            self.grid_max_low if self.grid_max_low is not None else self.n_low_range[1],
        )


def preset_profile(setup_id: str) -> SelectionProfile:
    """Selection profile of a named setup (all use six RBs).

    Setup 1: both classes uniform. Setup 2: uniform high class, low class
    confined to the first three RBs. Setup 3: skewed non-uniform vectors,
    the low class preferring exactly the RBs the high class avoids.
    """
    if setup_id == "1":
        return SelectionProfile.uniform(_PRESET_M)
    if setup_id == "2":
        return SelectionProfile(
            p_high=SelectionProfile.uniform(_PRESET_M).p_high, p_low=_SETUP2_P_LOW
        )
    if setup_id == "3":
        return SelectionProfile(p_high=_SETUP3_P_HIGH, p_low=_SETUP3_P_LOW)
    raise ValueError(f"no preset profile for setup {setup_id!r}")


def preset_config(setup_id: str, **overrides) -> ExperimentConfig:
    """Named experiment presets over the standard sweep.

    All presets sweep n_low over 0..7 with T in (1, 3, 10) on six RBs.
    Setup 1 fixes n_high = 2; setups 2 and 3 sweep n_high over (1, 2).
    Estimators search the swept ranges unless grid overrides are given.
    Keyword overrides replace any field (pass a ``profile`` override together
    with ``m`` for custom widths).
    """
    if setup_id not in ("1", "2", "3"):
        raise ValueError("presets exist for setups '1', '2' and '3'")
    base = dict(
        setup_id=setup_id,
        m=_PRESET_M,
        t_values=_PRESET_T_VALUES,
        n_high_values=(2,) if setup_id == "1" else (1, 2),
        n_low_range=_PRESET_N_LOW_RANGE,
        profile=preset_profile(setup_id),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


@dataclass(frozen=True)
class ExperimentRecord:
    """One estimator evaluation on one simulated trial."""

    setup_id: str
    estimator: str
    m: int
    t: int
    trial: int
    n_high_true: int
    n_low_true: int
    n_high_est: int
    n_low_est: int
    abs_err_high: int
    abs_err_low: int
    abs_err_total: int
    overloading_factor: float
    runtime_us: int


RECORD_FIELDS = tuple(f.name for f in fields(ExperimentRecord))
_RECORD_TYPES = {f.name: f.type for f in fields(ExperimentRecord)}


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: tuple[ExperimentRecord, ...]
    mae_rows: tuple[dict, ...]


def _run_point(
    config: ExperimentConfig, n_high: int, n_low: int, t: int
) -> list[ExperimentRecord]:
    truth = LoadHypothesis(n_high, n_low)
    seed = SimulationSeed(config.seed).with_context(n_high, n_low, t)
    grid = config.grid
    records = []
    for trial in range(config.trials):
        observations = sample_observations(truth, config.profile, t, seed, trial)
        for name in config.estimators:
            estimator = ESTIMATOR_FUNCS[name]
            started = time.perf_counter_ns()
            estimate = estimator(observations, config.profile, grid)
            elapsed_us = (time.perf_counter_ns() - started) // 1000
            err_high = abs(estimate.n_high - n_high)
            err_low = abs(estimate.n_low - n_low)
            records.append(
                ExperimentRecord(
                    setup_id=config.setup_id,
                    estimator=name,
                    m=config.m,
                    t=t,
                    trial=trial,
                    n_high_true=n_high,
                    n_low_true=n_low,
                    n_high_est=estimate.n_high,
                    n_low_est=estimate.n_low,
                    abs_err_high=err_high,
                    abs_err_low=err_low,
                    abs_err_total=err_high + err_low,
                    overloading_factor=truth.total / config.m,
                    runtime_us=int(elapsed_us),
                )
            )
    return records


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the full sweep; deterministic up to the runtime column."""
    points = [
        (n_high, n_low, t)
        for n_high in config.n_high_values
        for n_low in config.n_low_values
        for t in config.t_values
    ]
    if config.workers == 1:
        batches = [_run_point(config, *point) for point in points]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            batches = list(
                pool.map(lambda point: _run_point(config, *point), points)
            )
    records = sorted(
        (rec for batch in batches for rec in batch),
        key=lambda r: (r.estimator, r.n_high_true, r.n_low_true, r.t, r.trial),
    )
    mae_rows = compute_mae(records)
    return ExperimentResult(config=config, records=tuple(records), mae_rows=tuple(mae_rows))


def compute_mae(
    records: Iterable[ExperimentRecord],
    group_keys: Sequence[str] = DEFAULT_GROUP_KEYS,
) -> list[dict]:
    """Mean absolute errors (total and per class) grouped by ``group_keys``."""
    group_keys = tuple(group_keys)
    unknown = set(group_keys) - set(RECORD_FIELDS)
    if unknown:
        raise ValueError(f"unknown group keys: {sorted(unknown)}")
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for rec in records:
        key = tuple(getattr(rec, k) for k in group_keys)
        groups.setdefault(key, []).append(rec)
    rows = []
    for key in sorted(groups):
        members = groups[key]
        row = dict(zip(group_keys, key))
        row["num_trials"] = len(members)
        row["mae_high"] = statistics.fmean(r.abs_err_high for r in members)
        row["mae_low"] = statistics.fmean(r.abs_err_low for r in members)
        row["mae_total"] = statistics.fmean(r.abs_err_total for r in members)
        rows.append(row)
    return rows


def write_records_csv(records: Iterable[ExperimentRecord], path) -> None:
    """Records with the fixed header; values via ``str`` for reproducibility."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for rec in records:
            writer.writerow([str(getattr(rec, name)) for name in RECORD_FIELDS])


def read_records_csv(path) -> list[ExperimentRecord]:
    """Inverse of :func:`write_records_csv`."""
    casts = {"str": str, "int": int, "float": float}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RECORD_FIELDS:
            raise ValueError(f"unexpected CSV header in {path}")
        return [
            ExperimentRecord(
                **{
                    name: casts[_RECORD_TYPES[name]](row[name])
                    for name in RECORD_FIELDS
                }
            )
            for row in reader
        ]


def write_mae_csv(
    mae_rows: Iterable[dict], path, group_keys: Sequence[str] = DEFAULT_GROUP_KEYS
) -> None:
    """MAE summary in plot-ready columns (x = n_low_true, y = mae_*)."""
    columns = tuple(group_keys) + ("num_trials", "mae_high", "mae_low", "mae_total")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in mae_rows:
            writer.writerow([str(row[c]) for c in columns])
