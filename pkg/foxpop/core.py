"""Domain types shared by all phases: agents, home ranges and the population state.

Home ranges cache their non-cub occupancy by sex. Phases keep the cache current as
they go; ``rebuild_counts`` and ``check_counts`` recompute it from the roster."""
import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .errors import AgeOutOfRange

MAX_AGE = 12


class Sex(enum.Enum):
    FEMALE = "f"
    MALE = "m"

    @property
    def opposite(self):
        return Sex.MALE if self is Sex.FEMALE else Sex.FEMALE


class AgeClass(enum.Enum):
    CUB = "cub"
    YEARLING = "yearling"
    ADULT = "adult"


def classify_age(age):
    """Map age in years to its age class: 0 is a cub, 1 a yearling, 2 to 12 an adult.

    Raises ``AgeOutOfRange`` outside ``[0, 12]``."""
    if not 0 <= age <= MAX_AGE:
        raise AgeOutOfRange(
            "Age {} outside [0, {}]; over-age agents must be eliminated first".format(
                age, MAX_AGE
            )
        )
    if age == 0:
        return AgeClass.CUB
    elif age == 1:
        return AgeClass.YEARLING
    return AgeClass.ADULT


@dataclass
class Agent:
    id: int
    sex: Sex
    age: int
    home_range: int
    # False for floaters; cubs are always floaters
    resident: bool = False

    @property
    def age_class(self):
        return classify_age(self.age)

    @property
    def is_cub(self):
        return self.age == 0


@dataclass
class HomeRange:
    """A territory. Counts never include cubs.

    ``x`` and ``food`` are carried for completeness; no dynamics read them."""

    id: int
    n_male: int = 0
    n_female: int = 0
    x: Optional[Tuple[float, float]] = None
    food: Optional[str] = None

    @property
    def n_total(self):
        return self.n_male + self.n_female

    def count(self, sex):
        return self.n_male if sex is Sex.MALE else self.n_female

    def add(self, sex):
        if sex is Sex.MALE:
            self.n_male += 1
        else:
            self.n_female += 1

    def remove(self, sex):
        if sex is Sex.MALE:
            assert self.n_male > 0, "No male left in home range {}".format(self.id)
            self.n_male -= 1
        else:
            assert self.n_female > 0, "No female left in home range {}".format(self.id)
            self.n_female -= 1

    def reset(self):
        self.n_male = self.n_female = 0


@dataclass
class PopulationState:
    """Agents, the fixed set of home ranges, and the current year.

    Phase functions take ownership of a state, update it in place and return it. Copy first (``copy.deepcopy``) to keep an earlier state around."""

    ranges: List[HomeRange]
    agents: List[Agent] = field(default_factory=list)
    year: int = 0
    # Ids come from this per-run counter and are never reused
    next_id: int = 0

    @classmethod
    def empty(cls, num_ranges, home_ranges=None):
        """A state with ``num_ranges`` unoccupied home ranges.

        ``home_ranges`` is an optional list of ``{"x": ..., "food": ...}`` dicts, one per range."""
        home_ranges = home_ranges or [{}] * num_ranges
        return cls(
            ranges=[
                HomeRange(
                    id=index,
                    x=tuple(attrs["x"]) if attrs.get("x") is not None else None,
                    food=attrs.get("food"),
                )
                for index, attrs in enumerate(home_ranges)
            ]
        )

    @property
    def num_ranges(self):
        return len(self.ranges)

    def new_agent(self, sex, age, home_range, resident=False):
        """Create an agent with the next id, add it to the roster and to the range counts."""
        agent = Agent(
            id=self.next_id,
            sex=sex,
            age=age,
            home_range=home_range,
            resident=resident,
        )
        self.next_id += 1
        self.agents.append(agent)
        if not agent.is_cub:
            self.ranges[home_range].add(sex)
        return agent

    def tally(self):
        """Return ``(cubs, yearlings, adults)``."""
        cubs = yearlings = 0
        for agent in self.agents:
            if agent.age == 0:
                cubs += 1
            elif agent.age == 1:
                yearlings += 1
        return cubs, yearlings, len(self.agents) - cubs - yearlings


def _scan_counts(state):
    counts = [[0, 0] for _ in state.ranges]
    for agent in state.agents:
        if agent.is_cub:
            continue
        counts[agent.home_range][0 if agent.sex is Sex.MALE else 1] += 1
    return counts


def rebuild_counts(state):
    """Recompute every home range's counts from the agent roster, excluding cubs."""
    for home_range, (males, females) in zip(state.ranges, _scan_counts(state)):
        home_range.n_male = males
        home_range.n_female = females
    return state


def check_counts(state):
    """``True`` if the cached range counts match a scan of the roster."""
    return all(
        home_range.n_male == males and home_range.n_female == females
        for home_range, (males, females) in zip(state.ranges, _scan_counts(state))
    )


def count_non_cubs(state):
    return sum(1 for agent in state.agents if agent.age >= 1)
