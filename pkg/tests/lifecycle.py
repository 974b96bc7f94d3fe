import copy

import numpy as np
import pytest
from scipy import stats

from foxpop.core import HomeRange, PopulationState, Sex, check_counts, rebuild_counts
from foxpop.engine import make_rng
from foxpop.lifecycle import (
    PhaseEvents,
    ReproParams,
    aging_phase,
    candidate_ranges,
    dispersal_phase,
    draw_litter_sizes,
    reproduction_phase,
    survival_phase,
)
from foxpop.survival import SurvivalTable

from .fixtures import table


def populated(num_ranges=4, agents=()):
    state = PopulationState.empty(num_ranges)
    for sex, age, place in agents:
        state.new_agent(sex, age, place)
    return state


def mixed_state(seed=1, size=200, num_ranges=10):
    rng = make_rng(seed)
    state = PopulationState.empty(num_ranges)
    for _ in range(size):
        state.new_agent(
            Sex.FEMALE if rng.random() < 0.5 else Sex.MALE,
            int(rng.integers(0, 13)),
            int(rng.integers(0, num_ranges)),
        )
    return state


def test_repro_params_validation():
    with pytest.raises(ValueError):
        ReproParams(p_repro_adult=1.5)
    with pytest.raises(ValueError):
        ReproParams(litter_sd=-1)


def test_phase_events():
    first = PhaseEvents(deaths=1, litters=[(0, 0, 3)])
    second = PhaseEvents(deaths=2, moves=[(1, 0, 1)], litters=[(2, 1, 0)])
    first.extend(second)
    assert first.deaths == 3
    assert first.moves == [(1, 0, 1)]
    assert len(first.litters) == 2
    assert first.births == 3


def test_survival_certain():
    state = mixed_state()
    state, events = survival_phase(state, SurvivalTable.uniform(1), make_rng(2))
    assert len(state.agents) == 200
    assert events.deaths == 0
    assert check_counts(state)


def test_survival_impossible():
    state = mixed_state()
    state, events = survival_phase(state, SurvivalTable.uniform(0), make_rng(2))
    assert state.agents == []
    assert events.deaths == 200
    assert all(home_range.n_total == 0 for home_range in state.ranges)


def test_survival_empty():
    state, events = survival_phase(PopulationState.empty(3), table(), make_rng(0))
    assert state.agents == []
    assert events.deaths == 0


def test_survival_keeps_roster_order():
    state = mixed_state()
    state, _ = survival_phase(state, SurvivalTable.uniform(0.5), make_rng(3))
    ids = [agent.id for agent in state.agents]
    assert ids == sorted(ids)
    assert check_counts(state)


def test_survival_frequency():
    state = populated(1, [(Sex.FEMALE, 5, 0)] * 2000)
    state, _ = survival_phase(state, table(adult_f=0.7), make_rng(11))
    assert stats.binomtest(len(state.agents), 2000, 0.7).pvalue > 0.001


def test_survival_deterministic():
    first, _ = survival_phase(mixed_state(), table(), make_rng(5))
    second, _ = survival_phase(mixed_state(), table(), make_rng(5))
    assert [a.id for a in first.agents] == [a.id for a in second.agents]


def test_aging():
    state = populated(
        2, [(Sex.FEMALE, 0, 0), (Sex.MALE, 1, 0), (Sex.MALE, 12, 1), (Sex.FEMALE, 11, 1)]
    )
    state, events = aging_phase(state)
    assert [agent.age for agent in state.agents] == [1, 2, 12]
    assert events.eliminations_over_age == 1
    assert state.ranges[0].n_female == 1
    assert state.ranges[1].n_male == 0
    assert check_counts(state)


def test_aging_max_age():
    state = populated(1, [(Sex.FEMALE, 5, 0), (Sex.FEMALE, 6, 0)])
    state, events = aging_phase(state, max_age=6)
    assert events.eliminations_over_age == 1
    assert [agent.age for agent in state.agents] == [6]


def test_candidates_prefer_mates():
    ranges = [
        HomeRange(0),
        HomeRange(1, n_female=1),
        HomeRange(2, n_female=1, n_male=1),
        HomeRange(3),
    ]
    assert candidate_ranges(ranges, Sex.MALE) == [1]
    assert candidate_ranges(ranges, Sex.FEMALE) == [0, 3]


def test_candidates_least_occupied():
    ranges = [HomeRange(0, n_male=2), HomeRange(1, n_male=1), HomeRange(2, n_male=2)]
    assert candidate_ranges(ranges, Sex.MALE) == [1]


def test_candidates_include_origin():
    ranges = [HomeRange(0), HomeRange(1, n_male=1)]
    assert candidate_ranges(ranges, Sex.MALE) == [0]
    ranges = [HomeRange(0, n_female=1), HomeRange(1, n_female=1, n_male=1)]
    assert candidate_ranges(ranges, Sex.MALE) == [0]


def test_candidates_leave_origin():
    ranges = [HomeRange(0), HomeRange(1, n_male=1)]
    assert candidate_ranges(ranges, Sex.MALE, origin=0) == [1]
    assert candidate_ranges([HomeRange(0)], Sex.FEMALE, origin=0) == [0]


def test_candidates_single_range():
    assert candidate_ranges([HomeRange(0)], Sex.FEMALE) == [0]


def test_dispersal_pairs_up():
    for seed in range(10):
        state = populated(2, [(Sex.MALE, 3, 0), (Sex.FEMALE, 4, 1)])
        state, events = dispersal_phase(state, make_rng(seed))
        male, female = state.agents
        assert male.home_range == female.home_range
        assert len(events.moves) == 1
        assert male.resident != female.resident
        assert check_counts(state)


def test_dispersal_residents_stay():
    state = populated(3, [(Sex.MALE, 3, 0), (Sex.FEMALE, 4, 0)])
    state, events = dispersal_phase(state, make_rng(0))
    assert all(agent.resident for agent in state.agents)
    assert all(agent.home_range == 0 for agent in state.agents)
    assert events.moves == []


def test_dispersal_yearlings_float():
    for seed in range(10):
        state = populated(2, [(Sex.FEMALE, 1, 0), (Sex.MALE, 5, 0)])
        state, events = dispersal_phase(state, make_rng(seed))
        yearling, male = state.agents
        assert not yearling.resident
        assert male.resident
        # Her own range is the only one with a male and no female
        assert events.moves == [(0, 0, 0)]
        assert yearling.home_range == 0
        assert check_counts(state)


def test_dispersal_leave_origin():
    for seed in range(10):
        state = populated(2, [(Sex.FEMALE, 1, 0), (Sex.MALE, 5, 0)])
        state, events = dispersal_phase(state, make_rng(seed), leave_origin=True)
        assert state.agents[0].home_range == 1
        assert events.moves == [(0, 0, 1)]
        assert check_counts(state)


def test_dispersal_stays_in_least_occupied_origin():
    for seed in range(200):
        state = populated(3, [(Sex.MALE, 3, 0), (Sex.MALE, 3, 1), (Sex.MALE, 3, 2)])
        state, events = dispersal_phase(state, make_rng(seed))
        assert [agent.home_range for agent in state.agents] == [0, 1, 2]
        assert sorted(events.moves) == [(0, 0, 0), (1, 1, 1), (2, 2, 2)]
        assert not any(agent.resident for agent in state.agents)


def test_dispersal_tie_break_uniform():
    trials = 10000
    rng = make_rng(2024)
    landed = [0, 0, 0]
    for _ in range(trials):
        # The adults are a resident pair; the yearling must pick one of the two empty ranges
        state = populated(3, [(Sex.MALE, 1, 0), (Sex.MALE, 4, 0), (Sex.FEMALE, 4, 0)])
        state, _ = dispersal_phase(state, rng)
        landed[state.agents[0].home_range] += 1
    assert landed[0] == 0
    assert stats.chisquare(landed[1:]).pvalue > 0.01
    assert abs(landed[1] / trials - 0.5) <= 3 * (0.25 / trials) ** 0.5


def test_dispersal_single_range():
    state = populated(1, [(Sex.MALE, 3, 0)])
    state, events = dispersal_phase(state, make_rng(0))
    assert events.moves == [(0, 0, 0)]
    assert state.ranges[0].n_male == 1
    assert not state.agents[0].resident


def test_dispersal_keeps_counts():
    state = mixed_state(size=300)
    state.agents = [agent for agent in state.agents if not agent.is_cub]
    rebuild_counts(state)
    state, _ = dispersal_phase(state, make_rng(4))
    assert check_counts(state)
    assert sum(home_range.n_total for home_range in state.ranges) == len(state.agents)


def random_small_state(rng):
    num_ranges = int(rng.integers(1, 11))
    state = PopulationState.empty(num_ranges)
    for _ in range(int(rng.integers(0, 31))):
        state.new_agent(
            Sex.FEMALE if rng.random() < 0.5 else Sex.MALE,
            int(rng.integers(1, 13)),
            int(rng.integers(0, num_ranges)),
        )
    return state


def occupancy(agents, places, num_ranges):
    counts = [{Sex.FEMALE: 0, Sex.MALE: 0} for _ in range(num_ranges)]
    for agent in agents:
        counts[places[agent.id]][agent.sex] += 1
    return counts


def check_dispersal(before, after, events):
    """Replay ``events.moves`` against occupancy recounted from scratch after every move."""
    agents = {agent.id: agent for agent in before.agents}
    places = {agent.id: agent.home_range for agent in before.agents}
    snapshots = [occupancy(agents.values(), places, before.num_ranges)]
    moved = set()

    for agent_id, origin, destination in events.moves:
        agent = agents[agent_id]
        assert agent_id not in moved
        assert places[agent_id] == origin
        counts = [dict(cell) for cell in snapshots[-1]]
        # Floater at decision time: a yearling, or no opposite sex at home
        assert agent.age == 1 or counts[origin][agent.sex.opposite] == 0
        counts[origin][agent.sex] -= 1
        mates = [
            index
            for index, cell in enumerate(counts)
            if cell[agent.sex.opposite] > 0 and cell[agent.sex] == 0
        ]
        if mates:
            assert destination in mates
        else:
            totals = [sum(cell.values()) for cell in counts]
            assert totals[destination] == min(totals)
        moved.add(agent_id)
        places[agent_id] = destination
        snapshots.append(occupancy(agents.values(), places, before.num_ranges))

    assert {agent.id for agent in after.agents} == set(agents)
    for agent in after.agents:
        assert agent.home_range == places[agent.id]
        if agent.id in moved:
            assert not agent.resident
            continue
        # Residents are adults who had company of the opposite sex when their turn came
        assert agent.resident
        assert agent.age >= 2
        assert any(
            snapshot[agent.home_range][agent.sex.opposite] > 0 for snapshot in snapshots
        )


def test_dispersal_follows_rule_on_random_states():
    rng = make_rng(99)
    for seed in range(10000):
        state = random_small_state(rng)
        before = copy.deepcopy(state)
        after, events = dispersal_phase(state, make_rng(seed))
        check_dispersal(before, after, events)
        assert check_counts(after)


def test_litter_sizes_rounding():
    rng = make_rng(0)
    assert draw_litter_sizes(rng, ReproParams(litter_mean=2.5, litter_sd=0), 5).tolist() == [3] * 5
    assert draw_litter_sizes(rng, ReproParams(litter_mean=-3, litter_sd=0), 5).tolist() == [0] * 5
    assert draw_litter_sizes(rng, ReproParams(litter_mean=0.4, litter_sd=0), 5).tolist() == [0] * 5


def test_litter_sizes_distribution():
    params = ReproParams(litter_mean=4.0, litter_sd=1.0)
    sizes = draw_litter_sizes(make_rng(17), params, 20000)
    assert sizes.min() >= 0
    # Bins: <=2, 3, 4, 5, >=6
    edges = np.array([2.5, 3.5, 4.5, 5.5])
    cdf = stats.norm.cdf(edges, loc=4.0, scale=1.0)
    expected = np.diff(np.concatenate([[0.0], cdf, [1.0]])) * sizes.size
    observed = [
        (sizes <= 2).sum(),
        (sizes == 3).sum(),
        (sizes == 4).sum(),
        (sizes == 5).sum(),
        (sizes >= 6).sum(),
    ]
    assert stats.chisquare(observed, expected).pvalue > 0.001


def test_reproduction_needs_male():
    state = populated(2, [(Sex.FEMALE, 3, 0), (Sex.FEMALE, 3, 1), (Sex.MALE, 3, 1)])
    params = ReproParams(p_repro_adult=1, litter_mean=4, litter_sd=0)
    state, events = reproduction_phase(state, params, make_rng(0))
    assert [(mother, place, size) for mother, place, size in events.litters] == [(1, 1, 4)]
    assert events.births == 4
    cubs = [agent for agent in state.agents if agent.is_cub]
    assert len(cubs) == 4
    assert all(cub.home_range == 1 for cub in cubs)
    assert state.ranges[1].n_total == 2
    assert check_counts(state)


def test_reproduction_probabilities():
    state = populated(1, [(Sex.MALE, 3, 0), (Sex.FEMALE, 1, 0), (Sex.FEMALE, 4, 0)])
    params = ReproParams(p_repro_adult=1, p_repro_yearling=0, litter_mean=2, litter_sd=0)
    state, events = reproduction_phase(state, params, make_rng(0))
    assert [mother for mother, _, _ in events.litters] == [2]
    params = ReproParams(p_repro_adult=0, p_repro_yearling=0)
    _, events = reproduction_phase(state, params, make_rng(0))
    assert events.litters == []


def test_reproduction_cubs_dont_breed():
    state = populated(1, [(Sex.MALE, 3, 0), (Sex.FEMALE, 0, 0)])
    params = ReproParams(p_repro_adult=1, p_repro_yearling=1)
    _, events = reproduction_phase(state, params, make_rng(0))
    assert events.litters == []


def test_reproduction_empty_litter_counts():
    state = populated(1, [(Sex.MALE, 3, 0), (Sex.FEMALE, 4, 0)])
    params = ReproParams(p_repro_adult=1, litter_mean=-5, litter_sd=0)
    state, events = reproduction_phase(state, params, make_rng(0))
    assert events.litters == [(1, 0, 0)]
    assert events.births == 0
    assert len(state.agents) == 2


def test_reproduction_sex_ratio():
    state = populated(1, [(Sex.MALE, 3, 0)] + [(Sex.FEMALE, 3, 0)] * 500)
    params = ReproParams(p_repro_adult=1, litter_mean=4, litter_sd=0, p_sex_female=0.5)
    state, _ = reproduction_phase(state, params, make_rng(8))
    cubs = [agent for agent in state.agents if agent.is_cub]
    assert len(cubs) == 2000
    females = sum(1 for cub in cubs if cub.sex is Sex.FEMALE)
    assert stats.binomtest(females, 2000, 0.5).pvalue > 0.001


def test_litter_size_mean():
    sizes = draw_litter_sizes(make_rng(23), ReproParams(), 100000)
    assert sizes.min() >= 0
    assert 3.98 <= sizes.mean() <= 4.02
