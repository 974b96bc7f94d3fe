"""Scenario sweeps, outcome aggregation, calibration of the survival defaults, and the critical-mass estimate.

Every run of scenario ``i`` number ``j`` gets ``derive_seed(base_seed, i, j)``;
results are collected in task order, so outputs don't depend on the number of
workers."""
import enum
import itertools
import multiprocessing
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm
from voluptuous import MultipleInvalid

from .core import AgeClass
from .engine import Outcome, derive_seed, run_simulation
from .errors import EmptyResults, FileFormatError
from .filesystem import create_dir
from .logs import FakeLog
from .serialization import format_cell, read_csv_table, write_csv
from .survival import CELLS, SurvivalTable, clamp, shift_table
from .utils import grid
from .validate import dotted_path, target_row_validator

RUN_COLUMNS = (
    "scenario",
    "axis_value",
    "run_index",
    "seed",
    "outcome",
    "years",
    "lambda",
    "final_n",
)
SCENARIO_COLUMNS = (
    "scenario",
    "axis_value",
    "n_runs",
    "pct_extinct",
    "pct_max_limit",
    "lambda_mean",
    "lambda_median",
    "lambda_std",
)
TRAJECTORY_COLUMNS = (
    "scenario",
    "run_index",
    "year",
    "n",
    "n_cubs",
    "n_yearlings",
    "n_adults",
)
TARGET_COLUMNS = ("axis", "delta", "pct_extinct", "pct_max_limit")


class SweepAxis(enum.Enum):
    INITIAL_N = "initial-n"
    CUB_SURVIVAL = "cub-survival"
    YEARLING_SURVIVAL = "yearling-survival"
    ADULT_SURVIVAL = "adult-survival"

    @property
    def age_class(self):
        """Age class shifted by a survival axis; ``None`` for ``INITIAL_N``."""
        return {
            SweepAxis.CUB_SURVIVAL: AgeClass.CUB,
            SweepAxis.YEARLING_SURVIVAL: AgeClass.YEARLING,
            SweepAxis.ADULT_SURVIVAL: AgeClass.ADULT,
        }.get(self)


def sweep_values(axis):
    """Default grid: ``n0`` from 20 to 470 by 50, or survival deltas from -0.2 to +0.2 by 0.05."""
    if axis is SweepAxis.INITIAL_N:
        return list(range(20, 471, 50))
    return grid(-0.2, 0.2, 0.05)


def scenario_label(axis, value):
    return "{}={}".format(axis.value, format_cell(value))


def scenario_params(axis, value, params, init):
    """``(params, init)`` with one axis moved to ``value``."""
    if axis is SweepAxis.INITIAL_N:
        return params, replace(init, n0=int(value))
    return replace(params, survival=shift_table(params.survival, axis.age_class, value)), init


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    values: Optional[Tuple[float, ...]] = None
    runs_per_scenario: int = 100
    base_seed: int = 42

    def __post_init__(self):
        if self.values is None:
            object.__setattr__(self, "values", tuple(sweep_values(self.axis)))
        else:
            object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("Sweep needs at least one value")
        if self.runs_per_scenario < 1:
            raise ValueError("runs_per_scenario must be at least 1")


@dataclass
class RunRecord:
    """One run of one scenario, as written to the per-run file."""

    scenario: str
    axis_value: Optional[float]
    run_index: int
    result: object

    @property
    def outcome(self):
        return self.result.outcome

    @property
    def lambda_(self):
        return self.result.lambda_

    def as_row(self):
        return {
            "scenario": self.scenario,
            "axis_value": self.axis_value,
            "run_index": self.run_index,
            "seed": self.result.seed,
            "outcome": self.result.outcome.value,
            "years": self.result.years,
            "lambda": self.result.lambda_,
            "final_n": self.result.final_n,
        }

    def trajectory_rows(self):
        return [
            {
                "scenario": self.scenario,
                "run_index": self.run_index,
                "year": record.year,
                "n": record.n_non_cub,
                "n_cubs": record.n_cubs,
                "n_yearlings": record.n_yearlings,
                "n_adults": record.n_adults,
            }
            for record in self.result.trajectory
        ]


@dataclass
class ScenarioStats:
    scenario: str
    axis_value: Optional[float]
    n_runs: int
    pct_extinct: float
    pct_max_limit: float
    lambda_mean: Optional[float] = None
    lambda_median: Optional[float] = None
    lambda_std: Optional[float] = None

    @property
    def pct_horizon(self):
        return 1 - self.pct_extinct - self.pct_max_limit

    def as_row(self):
        return {column: getattr(self, column) for column in SCENARIO_COLUMNS}


@dataclass
class SweepResult:
    spec: SweepSpec
    stats: List[ScenarioStats]
    runs: List[RunRecord]


def aggregate(run_results, scenario="", axis_value=None):
    """Outcome fractions and growth-rate statistics over runs.

    ``run_results`` holds ``RunResult`` or ``RunRecord`` objects. Lambda statistics cover runs with a defined growth rate; the standard deviation uses ``ddof=0``."""
    run_results = list(run_results)
    if not run_results:
        raise EmptyResults("Can't aggregate zero runs")
    n = len(run_results)
    extinct = sum(1 for run in run_results if run.outcome is Outcome.EXTINCT)
    max_limit = sum(1 for run in run_results if run.outcome is Outcome.MAX_LIMIT)
    lambdas = np.array([run.lambda_ for run in run_results if run.lambda_ is not None])
    stats = ScenarioStats(
        scenario=scenario,
        axis_value=axis_value,
        n_runs=n,
        pct_extinct=extinct / n,
        pct_max_limit=max_limit / n,
    )
    if lambdas.size:
        stats.lambda_mean = float(lambdas.mean())
        stats.lambda_median = float(np.median(lambdas))
        stats.lambda_std = float(lambdas.std())
    return stats


def _simulate(task):
    params, init, seed = task
    return run_simulation(params, init, seed)


def execute(tasks, workers=1, progress=False, description=None):
    """Run ``(params, init, seed)`` tasks and return their ``RunResult`` objects in task order."""
    tasks = list(tasks)
    bar = dict(total=len(tasks), disable=not progress, desc=description, leave=False)
    if workers <= 1 or len(tasks) <= 1:
        return [_simulate(task) for task in tqdm(tasks, **bar)]
    processes = min(workers, len(tasks))
    chunksize = max(1, len(tasks) // (processes * 4))
    with multiprocessing.Pool(processes) as pool:
        return list(tqdm(pool.imap(_simulate, tasks, chunksize=chunksize), **bar))


def run_sweep(spec, base_params, init, workers=1, progress=False, log=None):
    """Run ``spec.runs_per_scenario`` seeded runs for every value on the sweep axis.

    Returns a ``SweepResult`` with per-run records and per-scenario statistics aggregated from them."""
    log = log or FakeLog()
    log.info(
        "Sweep over %s: %d scenarios x %d runs, base seed %d",
        spec.axis.value,
        len(spec.values),
        spec.runs_per_scenario,
        spec.base_seed,
    )
    tasks, labels = [], []
    for scenario_index, value in enumerate(spec.values):
        params, scenario_init = scenario_params(spec.axis, value, base_params, init)
        for run_index in range(spec.runs_per_scenario):
            seed = derive_seed(spec.base_seed, scenario_index, run_index)
            tasks.append((params, scenario_init, seed))
            labels.append((scenario_label(spec.axis, value), value, run_index))

    results = execute(tasks, workers, progress, description=spec.axis.value)
    runs = [
        RunRecord(scenario=label, axis_value=value, run_index=run_index, result=result)
        for (label, value, run_index), result in zip(labels, results)
    ]

    stats = []
    for offset, value in zip(
        range(0, len(runs), spec.runs_per_scenario), spec.values
    ):
        scenario_runs = runs[offset : offset + spec.runs_per_scenario]
        stats.append(
            aggregate(
                scenario_runs,
                scenario=scenario_label(spec.axis, value),
                axis_value=value,
            )
        )
        log.info(
            "%s: %.2f extinct, %.2f max limit",
            stats[-1].scenario,
            stats[-1].pct_extinct,
            stats[-1].pct_max_limit,
        )
    return SweepResult(spec=spec, stats=stats, runs=runs)


def write_sweep(result, dirpath, trajectories=False):
    """Write ``runs.csv``, ``scenarios.csv`` and optionally ``trajectories.csv``. Returns the written paths."""
    dirpath = Path(dirpath)
    create_dir(dirpath)
    written = [
        write_csv(dirpath / "runs.csv", [run.as_row() for run in result.runs], RUN_COLUMNS),
        write_csv(
            dirpath / "scenarios.csv",
            [stats.as_row() for stats in result.stats],
            SCENARIO_COLUMNS,
        ),
    ]
    if trajectories:
        rows = itertools.chain.from_iterable(run.trajectory_rows() for run in result.runs)
        written.append(write_csv(dirpath / "trajectories.csv", rows, TRAJECTORY_COLUMNS))
    return written


@dataclass(frozen=True)
class StoredRun:
    """A row of ``runs.csv``, enough to aggregate again."""

    scenario: str
    axis_value: Optional[float]
    outcome: Outcome
    lambda_: Optional[float]


def _optional_float(value):
    return float(value) if value != "" else None


def load_runs(filepath):
    """Read a per-run file written by ``write_sweep``."""
    rows = read_csv_table(filepath, RUN_COLUMNS)
    try:
        return [
            StoredRun(
                scenario=row["scenario"],
                axis_value=_optional_float(row["axis_value"]),
                outcome=Outcome(row["outcome"]),
                lambda_=_optional_float(row["lambda"]),
            )
            for row in rows
        ]
    except ValueError as e:
        raise FileFormatError("Invalid per-run file {}: {}".format(filepath, e))


def aggregate_file(filepath):
    """Per-scenario statistics recomputed from a persisted ``runs.csv``, in file order."""
    grouped = {}
    for run in load_runs(filepath):
        grouped.setdefault(run.scenario, []).append(run)
    if not grouped:
        raise EmptyResults("No runs in {}".format(filepath))
    return [
        aggregate(runs, scenario=scenario, axis_value=runs[0].axis_value)
        for scenario, runs in grouped.items()
    ]


def detect_critical_mass(stats):
    """Smallest initial population whose extinction fraction drops below one half, or ``None``.

    ``stats`` are the ``ScenarioStats`` of an initial-n sweep."""
    for scenario in sorted(stats, key=lambda x: x.axis_value):
        if scenario.pct_extinct < 0.5:
            return scenario.axis_value
    return None


# Published outcome fractions (extinct, max limit) per survival shift; baseline extinction is 99%
PUBLISHED_BASELINE_EXTINCTION = 0.99
PUBLISHED_OUTCOMES = {
    SweepAxis.CUB_SURVIVAL: (
        (0.05, 0.55, 0.0),
        (0.10, 0.01, 0.95),
        (0.15, 0.0, 1.0),
        (0.20, 0.0, 1.0),
    ),
    SweepAxis.YEARLING_SURVIVAL: (
        (0.05, 0.93, 0.0),
        (0.10, 0.58, 0.04),
        (0.15, 0.20, 0.51),
        (0.20, 0.03, 0.95),
    ),
    SweepAxis.ADULT_SURVIVAL: (
        (0.05, 0.69, 0.0),
        (0.10, 0.05, 0.85),
        (0.15, 0.0, 0.98),
        (0.20, 0.0, 1.0),
    ),
}


@dataclass(frozen=True)
class TargetRow:
    axis: SweepAxis
    delta: float
    pct_extinct: float
    # ``None`` leaves the max-limit fraction out of the objective
    pct_max_limit: Optional[float] = None


@dataclass(frozen=True)
class CalibrationTarget:
    target_extinction_at_default: Optional[float] = PUBLISHED_BASELINE_EXTINCTION
    rows: Tuple[TargetRow, ...] = tuple(
        TargetRow(SweepAxis.CUB_SURVIVAL, *row)
        for row in PUBLISHED_OUTCOMES[SweepAxis.CUB_SURVIVAL]
    )
    # Largest accepted deviation per fraction, in units of fraction (0.1 = 10 points)
    tolerance: float = 0.10

    def all_rows(self):
        rows = list(self.rows)
        if self.target_extinction_at_default is not None:
            rows.insert(
                0,
                TargetRow(SweepAxis.CUB_SURVIVAL, 0.0, self.target_extinction_at_default),
            )
        return rows

    @classmethod
    def published(cls, axes=(SweepAxis.CUB_SURVIVAL,), tolerance=0.10):
        rows = tuple(
            TargetRow(axis, *row) for axis in axes for row in PUBLISHED_OUTCOMES[axis]
        )
        return cls(PUBLISHED_BASELINE_EXTINCTION, rows, tolerance)

    @classmethod
    def from_csv(cls, filepath, tolerance=0.10):
        """Read ``axis,delta,pct_extinct,pct_max_limit`` rows; an empty max-limit cell means "not targeted"."""
        rows = []
        for line, row in enumerate(read_csv_table(filepath, TARGET_COLUMNS), start=2):
            try:
                row = target_row_validator(row)
            except MultipleInvalid as e:
                raise FileFormatError(
                    "Invalid target row on line {} of {}: {} ({})".format(
                        line, filepath, dotted_path(e.path), e.msg
                    )
                )
            rows.append(
                TargetRow(
                    SweepAxis(row["axis"]),
                    row["delta"],
                    row["pct_extinct"],
                    row["pct_max_limit"],
                )
            )
        if not rows:
            raise FileFormatError("Targets file {} has no rows".format(filepath))
        return cls(target_extinction_at_default=None, rows=tuple(rows), tolerance=tolerance)


def stage_table(cub, yearling, adult):
    """Survival table with equal values for both sexes."""
    values = {AgeClass.CUB: cub, AgeClass.YEARLING: yearling, AgeClass.ADULT: adult}
    return SurvivalTable({cell: float(values[cell[0]]) for cell in CELLS})


@dataclass(frozen=True)
class SearchSpace:
    """Candidate ``(cub, yearling, adult)`` survival values, sexes equal."""

    cub: Tuple[float, ...] = tuple(grid(0.20, 0.60, 0.05))
    yearling: Tuple[float, ...] = tuple(grid(0.40, 0.90, 0.05))
    adult: Tuple[float, ...] = tuple(grid(0.50, 0.90, 0.05))
    # Half-width of the local grid searched around the best coarse candidate; ``None`` skips refinement
    refine_step: Optional[float] = 0.025
    finalists: int = 5

    @classmethod
    def with_step(cls, step, **kwargs):
        return cls(
            cub=tuple(grid(0.20, 0.60, step)),
            yearling=tuple(grid(0.40, 0.90, step)),
            adult=tuple(grid(0.50, 0.90, step)),
            refine_step=step / 2,
            **kwargs
        )

    def candidates(self):
        return list(itertools.product(self.cub, self.yearling, self.adult))

    def neighbours(self, candidate):
        if not self.refine_step:
            return []
        offsets = (-self.refine_step, 0.0, self.refine_step)
        return [
            tuple(
                clamp(round(value + offset, 10))
                for value, offset in zip(candidate, shift)
            )
            for shift in itertools.product(offsets, repeat=3)
        ]


@dataclass
class CandidateScore:
    stages: Tuple[float, float, float]
    # (extinct, max limit) fractions per target row
    achieved: List[Tuple[float, float]]
    objective: float

    @property
    def table(self):
        return stage_table(*self.stages)


@dataclass
class CalibrationResult:
    table: SurvivalTable
    stages: Tuple[float, float, float]
    rows: List[TargetRow]
    achieved: List[Tuple[float, float]]
    objective: float
    within_tolerance: bool
    runs_per_scenario: int
    base_seed: int
    candidates_evaluated: int = 0

    def report(self):
        return [
            {
                "axis": row.axis.value,
                "delta": row.delta,
                "target_extinct": row.pct_extinct,
                "achieved_extinct": extinct,
                "target_max_limit": row.pct_max_limit,
                "achieved_max_limit": max_limit,
            }
            for row, (extinct, max_limit) in zip(self.rows, self.achieved)
        ]

    def as_fragment(self):
        """Config document fragment: the winning survival table plus a provenance block."""
        return {
            "model": {"survival": self.table.as_config()},
            "provenance": {
                "survival": "Grid calibration against outcome fractions",
                "runs_per_scenario": self.runs_per_scenario,
                "base_seed": self.base_seed,
                "candidates_evaluated": self.candidates_evaluated,
                "objective": self.objective,
                "within_tolerance": self.within_tolerance,
                "rows": self.report(),
            },
        }


def _score(rows, achieved):
    total = 0.0
    for row, (extinct, max_limit) in zip(rows, achieved):
        total += (extinct - row.pct_extinct) ** 2
        if row.pct_max_limit is not None:
            total += (max_limit - row.pct_max_limit) ** 2
    return total


def _deviation(rows, achieved):
    worst = 0.0
    for row, (extinct, max_limit) in zip(rows, achieved):
        worst = max(worst, abs(extinct - row.pct_extinct))
        if row.pct_max_limit is not None:
            worst = max(worst, abs(max_limit - row.pct_max_limit))
    return worst


def evaluate_candidates(
    candidates, rows, base_params, init, runs, base_seed, workers=1, progress=False
):
    """Score each ``(cub, yearling, adult)`` candidate against the target rows.

    Row ``k`` run ``j`` uses ``derive_seed(base_seed, k, j)`` for every candidate, so candidates are compared on the same random streams."""
    tasks = []
    for candidate in candidates:
        table = stage_table(*candidate)
        for row_index, row in enumerate(rows):
            params = replace(
                base_params, survival=shift_table(table, row.axis.age_class, row.delta)
            )
            for run_index in range(runs):
                tasks.append((params, init, derive_seed(base_seed, row_index, run_index)))

    results = execute(tasks, workers, progress, description="calibration")
    scores = []
    per_candidate = runs * len(rows)
    for position, candidate in enumerate(candidates):
        achieved = []
        for row_index in range(len(rows)):
            start = position * per_candidate + row_index * runs
            stats = aggregate(results[start : start + runs])
            achieved.append((stats.pct_extinct, stats.pct_max_limit))
        scores.append(
            CandidateScore(
                stages=tuple(candidate),
                achieved=achieved,
                objective=_score(rows, achieved),
            )
        )
    return scores


def calibrate_defaults(
    target,
    search_space,
    base_params,
    init,
    runs_per_scenario=100,
    coarse_runs=None,
    base_seed=42,
    workers=1,
    progress=False,
    log=None,
):
    """Find the survival table whose outcome fractions best match ``target``.

    A coarse grid over ``search_space`` is scored with ``coarse_runs`` runs per row (default ``runs_per_scenario``); the best ``finalists`` and a local grid around the best one are rescored with ``runs_per_scenario`` runs. The objective is the summed squared error of the extinct and max-limit fractions. Warns if the winner misses any row by more than ``target.tolerance``."""
    log = log or FakeLog()
    rows = target.all_rows()
    if not rows:
        raise ValueError("Calibration target has no rows")
    coarse_runs = coarse_runs or runs_per_scenario
    candidates = search_space.candidates()
    log.info("Coarse calibration: %d candidates x %d rows x %d runs", len(candidates), len(rows), coarse_runs)

    scores = evaluate_candidates(
        candidates, rows, base_params, init, coarse_runs, base_seed, workers, progress
    )
    ranked = sorted(scores, key=lambda x: (x.objective, x.stages))
    finalists = [score.stages for score in ranked[: search_space.finalists]]
    for stages in search_space.neighbours(ranked[0].stages):
        if stages not in finalists:
            finalists.append(stages)
    evaluated = len(candidates) + len(finalists)

    if coarse_runs != runs_per_scenario or search_space.refine_step:
        log.info("Refining %d candidates with %d runs", len(finalists), runs_per_scenario)
        final = evaluate_candidates(
            finalists, rows, base_params, init, runs_per_scenario, base_seed, workers, progress
        )
        best = min(final, key=lambda x: (x.objective, x.stages))
    else:
        best = ranked[0]

    within = _deviation(rows, best.achieved) <= target.tolerance + 1e-12
    log.info("Best candidate %s, objective %s", best.stages, best.objective)
    if not within:
        message = "Best calibration candidate {} misses a target by more than {}".format(
            best.stages, target.tolerance
        )
        log.warning(message)
        warnings.warn(message)
    return CalibrationResult(
        table=best.table,
        stages=best.stages,
        rows=rows,
        achieved=best.achieved,
        objective=best.objective,
        within_tolerance=within,
        runs_per_scenario=runs_per_scenario,
        base_seed=base_seed,
        candidates_evaluated=evaluated,
    )
