"""Annual steps and full runs: initialization, stopping rules, trajectories and growth rates."""
import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .core import MAX_AGE, PopulationState, Sex, check_counts
from .errors import ConfigurationError, CountMismatch
from .lifecycle import (
    PhaseEvents,
    ReproParams,
    aging_phase,
    dispersal_phase,
    reproduction_phase,
    survival_phase,
)
from .survival import SurvivalTable
from .utils import round_int


class Outcome(enum.Enum):
    EXTINCT = "extinct"
    MAX_LIMIT = "max_limit"
    HORIZON_REACHED = "horizon"


@dataclass(frozen=True)
class ModelParams:
    survival: SurvivalTable
    num_ranges: int = 60
    repro: ReproParams = field(default_factory=ReproParams)
    max_age: int = MAX_AGE
    extinction_threshold: int = 10
    max_population: int = 500
    horizon: int = 50
    burn_in: int = 3
    lambda_method: str = "arithmetic"
    # Floaters must leave their range when another one exists
    leave_origin: bool = False
    # Inert per-range attributes: ``{"x": [..], "food": ..}``
    home_ranges: Optional[Tuple[dict, ...]] = None

    def __post_init__(self):
        if self.num_ranges < 1:
            raise ConfigurationError(
                "num_ranges must be at least 1", path="model.num_ranges"
            )
        if not 1 <= self.max_age <= MAX_AGE:
            raise ConfigurationError(
                "max_age must be in [1, {}]".format(MAX_AGE), path="model.max_age"
            )
        if self.extinction_threshold >= self.max_population:
            raise ConfigurationError(
                "extinction_threshold must be smaller than max_population",
                path="model.extinction_threshold",
            )
        if self.horizon <= self.burn_in:
            raise ConfigurationError(
                "horizon must be larger than burn_in", path="model.burn_in"
            )
        if self.lambda_method not in ("arithmetic", "geometric"):
            raise ConfigurationError(
                "Unknown lambda method {}".format(self.lambda_method),
                path="model.lambda_method",
            )
        if self.home_ranges is not None and len(self.home_ranges) != self.num_ranges:
            raise ConfigurationError(
                "Need one entry per home range", path="model.home_ranges"
            )


@dataclass(frozen=True)
class InitParams:
    n0: int = 120
    prop_adult: float = 0.24
    prop_yearling: float = 0.15
    prop_cub: float = 0.61
    adult_age_min: int = 2
    adult_age_max: int = 8

    def __post_init__(self):
        if abs(self.prop_adult + self.prop_yearling + self.prop_cub - 1) > 1e-9:
            raise ConfigurationError(
                "Initial proportions must sum to 1", path="init.prop_*"
            )
        if self.n0 < 0:
            raise ConfigurationError("n0 must be non-negative", path="init.n0")
        if not 2 <= self.adult_age_min <= self.adult_age_max <= MAX_AGE:
            raise ConfigurationError(
                "Need 2 <= adult_age_min <= adult_age_max <= {}".format(MAX_AGE),
                path="init.adult_age_min",
            )

    def stage_counts(self):
        """``(adults, yearlings, cubs)`` at year zero.

        ``n0`` counts yearlings and adults only, while the proportions describe the whole population, cubs included."""
        share = self.prop_adult + self.prop_yearling
        if not self.n0 or share <= 0:
            return 0, 0, 0
        adults = round_int(self.n0 * self.prop_adult / share)
        cubs = round_int(self.n0 * self.prop_cub / share)
        return adults, self.n0 - adults, cubs


@dataclass(frozen=True)
class YearRecord:
    year: int
    n_non_cub: int
    n_cubs: int
    n_yearlings: int
    n_adults: int

    @classmethod
    def from_state(cls, state):
        cubs, yearlings, adults = state.tally()
        return cls(
            year=state.year,
            n_non_cub=yearlings + adults,
            n_cubs=cubs,
            n_yearlings=yearlings,
            n_adults=adults,
        )


@dataclass
class RunResult:
    seed: int
    trajectory: List[YearRecord]
    outcome: Outcome
    lambda_: Optional[float]
    deaths: int = 0
    eliminations: int = 0
    moves: int = 0
    litters: int = 0
    births: int = 0

    @property
    def years(self):
        return self.trajectory[-1].year

    @property
    def final_n(self):
        return self.trajectory[-1].n_non_cub


def derive_seed(base_seed, scenario_index, run_index):
    """Seed for one run of a scenario: the first 64-bit word of ``numpy.random.SeedSequence([base_seed, scenario_index, run_index])``.

    Depends on nothing else, so any execution order gives the same streams."""
    sequence = np.random.SeedSequence([base_seed, scenario_index, run_index])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed):
    """PCG64 stream for ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def init_population(init, num_ranges, rng, home_ranges=None):
    """Populate year zero: adults with uniform ages, yearlings, cubs, fair sexes, uniform random ranges.

    Residency flags start false; the first dispersal sets them."""
    if num_ranges < 1:
        raise ConfigurationError(
            "num_ranges must be at least 1", path="model.num_ranges"
        )
    state = PopulationState.empty(num_ranges, home_ranges)
    adults, yearlings, cubs = init.stage_counts()
    total = adults + yearlings + cubs
    if not total:
        return state

    females = rng.random(total) < 0.5
    ages = np.concatenate(
        [
            rng.integers(init.adult_age_min, init.adult_age_max + 1, adults),
            np.ones(yearlings, dtype=int),
            np.zeros(cubs, dtype=int),
        ]
    )
    places = rng.integers(0, num_ranges, total)
    for female, age, place in zip(females, ages, places):
        state.new_agent(
            sex=Sex.FEMALE if female else Sex.MALE,
            age=int(age),
            home_range=int(place),
        )
    return state


def step_year(state, params, rng, validate_counts=False):
    """One year: survival, aging, dispersal, reproduction. Returns ``(state, PhaseEvents)``.

    With ``validate_counts``, raise ``CountMismatch`` if the cached counts drift after any phase."""
    events = PhaseEvents()
    phases = (
        ("survival", lambda s: survival_phase(s, params.survival, rng)),
        ("aging", lambda s: aging_phase(s, params.max_age)),
        ("dispersal", lambda s: dispersal_phase(s, rng, params.leave_origin)),
        ("reproduction", lambda s: reproduction_phase(s, params.repro, rng)),
    )
    for name, phase in phases:
        state, phase_events = phase(state)
        events.extend(phase_events)
        if validate_counts and not check_counts(state):
            raise CountMismatch(
                "Range counts out of date after {} phase in year {}".format(
                    name, state.year + 1
                )
            )
    state.year += 1
    return state, events


def run_simulation(params, init, seed, validate_counts=False):
    """Run one replicate until extinction, the population cap, or the horizon.

    Stopping rules are checked after each completed year."""
    rng = make_rng(seed)
    state = init_population(init, params.num_ranges, rng, params.home_ranges)
    trajectory = [YearRecord.from_state(state)]
    deaths = eliminations = moves = litters = births = 0
    outcome = Outcome.HORIZON_REACHED

    while state.year < params.horizon:
        state, events = step_year(state, params, rng, validate_counts)
        deaths += events.deaths
        eliminations += events.eliminations_over_age
        moves += len(events.moves)
        litters += len(events.litters)
        births += events.births

        record = YearRecord.from_state(state)
        trajectory.append(record)
        if record.n_non_cub < params.extinction_threshold:
            outcome = Outcome.EXTINCT
            break
        if record.n_non_cub >= params.max_population:
            outcome = Outcome.MAX_LIMIT
            break

    return RunResult(
        seed=seed,
        trajectory=trajectory,
        outcome=outcome,
        lambda_=compute_lambda(trajectory, params.burn_in, method=params.lambda_method),
        deaths=deaths,
        eliminations=eliminations,
        moves=moves,
        litters=litters,
        births=births,
    )


def compute_lambda(trajectory, burn_in, method="arithmetic", until=None):
    """Average annual growth rate of the non-cub population after ``burn_in`` years.

    ``trajectory`` holds ``YearRecord`` objects or plain counts. The arithmetic method averages ``(n[t+1] - n[t]) / n[t]`` over ``t >= burn_in``; the geometric method returns the mean multiplicative rate minus one. A year with ``n[t] == 0`` ends the window, and ``until`` (a year) cuts it short. Returns ``None`` when no rate can be computed."""
    counts = [
        record.n_non_cub if isinstance(record, YearRecord) else record
        for record in trajectory
    ]
    if until is not None:
        counts = counts[: until + 1]
    if len(counts) < burn_in + 2:
        return None

    rates = []
    for t in range(burn_in, len(counts) - 1):
        if counts[t] == 0:
            break
        rates.append((counts[t + 1] - counts[t]) / counts[t])
    if not rates:
        return None
    if method == "arithmetic":
        return float(np.mean(rates))
    elif method == "geometric":
        return float(np.prod(np.add(rates, 1.0)) ** (1 / len(rates)) - 1)
    raise ValueError("Unknown lambda method {}".format(method))
