import numpy as np

from foxpop.utils import grid, round_half_away, round_int


def test_round_half_away():
    assert round_half_away(2.5) == 3
    assert round_half_away(-2.5) == -3
    assert round_half_away(3.49) == 3
    assert round_half_away(0.5) == 1
    assert round(2.5) == 2  # builtin rounds to even


def test_round_half_away_array():
    values = np.array([-1.5, -0.4, 0.5, 1.5, 2.4])
    assert round_half_away(values).tolist() == [-2, -0, 1, 2, 2]


def test_round_int():
    assert round_int(73.846) == 74
    assert isinstance(round_int(1.5), int)


def test_grid():
    values = grid(-0.2, 0.2, 0.05)
    assert len(values) == 9
    assert values[0] == -0.2
    assert values[4] == 0.0
    assert values[-1] == 0.2
    assert values[5] == 0.05
    assert grid(0.2, 0.6, 0.05)[-1] == 0.6


def test_grid_stops_at_bound():
    assert grid(0.4, 0.9, 0.2) == [0.4, 0.6, 0.8]
    assert grid(0.5, 0.9, 0.2) == [0.5, 0.7, 0.9]
