"""The annual phases: winter survival, aging, dispersal and reproduction.

Each phase takes a ``PopulationState``, updates it in place, and returns
``(state, PhaseEvents)``. Agents are visited in a fresh uniformly shuffled order
per phase, and home range counts are updated as each agent is processed, so later
agents see earlier moves. All randomness comes from the ``rng`` argument, a
``numpy.random.Generator``."""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .core import MAX_AGE, AgeClass, Sex, classify_age
from .utils import round_half_away


@dataclass(frozen=True)
class ReproParams:
    p_repro_adult: float = 0.5
    p_repro_yearling: float = 0.1
    litter_mean: float = 4.0
    litter_sd: float = 1.0
    p_sex_female: float = 0.5

    def __post_init__(self):
        for name in ("p_repro_adult", "p_repro_yearling", "p_sex_female"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(
                    "{} must be in [0, 1], got {}".format(name, getattr(self, name))
                )
        if self.litter_sd < 0:
            raise ValueError("litter_sd must be non-negative")


@dataclass
class PhaseEvents:
    deaths: int = 0
    eliminations_over_age: int = 0
    # (agent id, from range, to range)
    moves: List[Tuple[int, int, int]] = field(default_factory=list)
    # (mother id, range, litter size)
    litters: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def births(self):
        return sum(size for _, _, size in self.litters)

    def extend(self, other):
        self.deaths += other.deaths
        self.eliminations_over_age += other.eliminations_over_age
        self.moves.extend(other.moves)
        self.litters.extend(other.litters)
        return self


def survival_phase(state, table, rng):
    """Each agent survives independently with ``table[(age class, sex)]``; the rest are removed."""
    events = PhaseEvents()
    agents = state.agents
    if not agents:
        return state, events

    order = rng.permutation(len(agents))
    draws = rng.random(len(agents))
    alive = np.zeros(len(agents), dtype=bool)
    for draw, index in zip(draws, order):
        agent = agents[index]
        if draw < table.get(classify_age(agent.age), agent.sex):
            alive[index] = True
            continue
        events.deaths += 1
        if not agent.is_cub:
            state.ranges[agent.home_range].remove(agent.sex)

    # Keep roster order so replays stay identical
    state.agents = [agent for agent, keep in zip(agents, alive) if keep]
    return state, events


def aging_phase(state, max_age=MAX_AGE):
    """Everyone grows a year; agents older than ``max_age`` are eliminated.

    Last year's cubs become yearlings and start counting towards their home range."""
    events = PhaseEvents()
    survivors = []
    for agent in state.agents:
        agent.age += 1
        if agent.age > max_age:
            events.eliminations_over_age += 1
            state.ranges[agent.home_range].remove(agent.sex)
            continue
        if agent.age == 1:
            state.ranges[agent.home_range].add(agent.sex)
        survivors.append(agent)
    state.agents = survivors
    return state, events


def candidate_ranges(ranges, sex, origin=None):
    """Home ranges a floater of ``sex`` may move to.

    The floater must already be removed from its origin's counts. Prefers ranges with a potential mate and no rival; otherwise the least occupied ranges. Every range is eligible, the origin included, unless ``origin`` is given: then it is left out whenever another range exists."""
    eligible = list(ranges)
    if origin is not None and len(eligible) > 1:
        eligible = [home_range for home_range in eligible if home_range.id != origin]
    opposite = sex.opposite
    mates = [
        home_range.id
        for home_range in eligible
        if home_range.count(opposite) > 0 and home_range.count(sex) == 0
    ]
    if mates:
        return mates
    least = min(home_range.n_total for home_range in eligible)
    return [home_range.id for home_range in eligible if home_range.n_total == least]


def dispersal_phase(state, rng, leave_origin=False):
    """Adults sharing their range with the opposite sex become residents; everyone else floats and moves.

    Yearlings are never residents. Cubs are skipped (they don't exist at this point in a normal year). A floater may land back in its own range; with ``leave_origin`` it must pick another one if there is any."""
    events = PhaseEvents()
    agents = state.agents
    ranges = state.ranges
    if not agents:
        return state, events

    for index in rng.permutation(len(agents)):
        agent = agents[index]
        if agent.is_cub:
            continue
        origin = ranges[agent.home_range]
        if (
            classify_age(agent.age) is AgeClass.ADULT
            and origin.count(agent.sex.opposite) > 0
        ):
            agent.resident = True
            continue

        agent.resident = False
        origin.remove(agent.sex)
        candidates = candidate_ranges(
            ranges, agent.sex, origin.id if leave_origin else None
        )
        destination = candidates[rng.integers(len(candidates))]
        ranges[destination].add(agent.sex)
        agent.home_range = destination
        events.moves.append((agent.id, origin.id, destination))
    return state, events


def draw_litter_sizes(rng, params, size):
    """Normal draws with mean ``litter_mean`` and sd ``litter_sd``, rounded half away from zero and clamped at zero."""
    draws = rng.normal(params.litter_mean, params.litter_sd, size)
    return np.maximum(round_half_away(draws), 0).astype(int)


def reproduction_phase(state, params, rng):
    """Adult and yearling females sharing a range with a male give birth with probability ``p_repro_adult`` or ``p_repro_yearling``.

    A zero-sized litter still counts as a litter. Newborns are cubs in the mother's range and don't enter range counts."""
    events = PhaseEvents()
    ranges = state.ranges
    mothers = [
        agent
        for agent in state.agents
        if agent.sex is Sex.FEMALE
        and not agent.is_cub
        and ranges[agent.home_range].n_male > 0
    ]
    if not mothers:
        return state, events

    for index in rng.permutation(len(mothers)):
        mother = mothers[index]
        if classify_age(mother.age) is AgeClass.ADULT:
            probability = params.p_repro_adult
        else:
            probability = params.p_repro_yearling
        if rng.random() >= probability:
            continue
        size = int(draw_litter_sizes(rng, params, 1)[0])
        events.litters.append((mother.id, mother.home_range, size))
        for female in rng.random(size) < params.p_sex_female:
            state.new_agent(
                sex=Sex.FEMALE if female else Sex.MALE,
                age=0,
                home_range=mother.home_range,
            )
    return state, events
