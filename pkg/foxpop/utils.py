import numpy as np


def round_half_away(value):
    """Round to the nearest integer, halves away from zero. Works on scalars and arrays.

    ``round_half_away(2.5) == 3.0`` and ``round_half_away(-2.5) == -3.0``, unlike ``round``."""
    return np.sign(value) * np.floor(np.abs(value) + 0.5)


def round_int(value):
    return int(round_half_away(value))


def grid(start, stop, step):
    """Grid from ``start`` by ``step``, up to and including ``stop`` when it lies on the grid. Values are rounded to remove float noise.

    ``grid(-0.2, 0.2, 0.05)`` gives nine values, the middle one exactly ``0.0``."""
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + index * step, 10) + 0.0 for index in range(count)]
