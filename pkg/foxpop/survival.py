"""Age- and sex-specific survival: the table, and estimators over tagged-cohort counts.

The Bayes estimator assumes age class and sex are independent:

.. math::

    p(\\phi=1 | A, s) = \\frac{p(A | \\phi=1) \\, p(s | \\phi=1) \\, p(\\phi=1)}{p(A) \\, p(s)}

Every component is an empirical frequency over the pooled cohort. The product can
exceed one when the assumption fails, so results are clamped and the clamping is
reported."""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from voluptuous import MultipleInvalid

from .core import AgeClass, Sex
from .errors import FileFormatError, EstimationError
from .serialization import read_csv_table
from .validate import cohort_row_validator, dotted_path

CELLS = tuple((age_class, sex) for age_class in AgeClass for sex in Sex)
COHORT_COLUMNS = ("age_class", "sex", "survived", "died")


def cell_key(cell):
    """``(AgeClass.CUB, Sex.FEMALE)`` becomes ``"cub_f"``."""
    age_class, sex = cell
    return "{}_{}".format(age_class.value, sex.value)


def cell_label(cell):
    """``(AgeClass.ADULT, Sex.MALE)`` becomes ``"(adult, m)"``."""
    age_class, sex = cell
    return "({}, {})".format(age_class.value, sex.value)


KEY_TO_CELL = {cell_key(cell): cell for cell in CELLS}


def clamp(value, low=0.0, high=1.0):
    return min(max(value, low), high)


@dataclass(frozen=True)
class SurvivalTable:
    p_survive: Dict[Tuple[AgeClass, Sex], float]

    def __post_init__(self):
        missing = [cell_label(cell) for cell in CELLS if cell not in self.p_survive]
        if missing:
            raise ValueError("Survival table missing cells: {}".format(", ".join(missing)))
        for cell, value in self.p_survive.items():
            if not 0 <= value <= 1:
                raise ValueError(
                    "Survival probability {} for {} outside [0, 1]".format(
                        value, cell_label(cell)
                    )
                )

    def __getitem__(self, cell):
        return self.p_survive[cell]

    def get(self, age_class, sex):
        return self.p_survive[(age_class, sex)]

    @classmethod
    def uniform(cls, probability):
        return cls({cell: float(probability) for cell in CELLS})

    @classmethod
    def from_config(cls, data):
        """Build from ``{"cub_f": ..., ..., "adult_m": ...}``."""
        return cls({KEY_TO_CELL[key]: float(value) for key, value in data.items()})

    def as_config(self):
        return {cell_key(cell): self.p_survive[cell] for cell in CELLS}


@dataclass
class SurvivalDiagnostics:
    raw_values: Dict[Tuple[AgeClass, Sex], float]
    clamped_cells: List[Tuple[AgeClass, Sex]] = field(default_factory=list)

    @property
    def clamped(self):
        return bool(self.clamped_cells)


@dataclass(frozen=True)
class CohortCounts:
    """Survival trials per ``(AgeClass, Sex)`` cell, as ``(survived, died)`` pairs.

    Each (animal, year) transition counts as one trial. Missing cells count as empty."""

    cells: Dict[Tuple[AgeClass, Sex], Tuple[int, int]]

    def __post_init__(self):
        for cell, (survived, died) in self.cells.items():
            if survived < 0 or died < 0:
                raise FileFormatError(
                    "Negative count in cohort cell {}".format(cell_label(cell))
                )
        if not any(survived + died for survived, died in self.cells.values()):
            raise FileFormatError("Cohort has no observations")

    def survived(self, cell):
        return self.cells.get(cell, (0, 0))[0]

    def died(self, cell):
        return self.cells.get(cell, (0, 0))[1]

    def total(self, cell):
        return self.survived(cell) + self.died(cell)

    def scaled(self, factor):
        return CohortCounts(
            {cell: (s * factor, d * factor) for cell, (s, d) in self.cells.items()}
        )

    @classmethod
    def from_rows(cls, rows):
        """Sum validated rows of ``{"age_class", "sex", "survived", "died"}``; repeated cells add up."""
        cells = {}
        for row in rows:
            cell = (AgeClass(row["age_class"]), Sex(row["sex"]))
            survived, died = cells.get(cell, (0, 0))
            cells[cell] = (survived + row["survived"], died + row["died"])
        return cls(cells)


def read_cohort(filepath):
    """Load a cohort CSV with header ``age_class,sex,survived,died``.

    Cells without rows count as empty. The Bayes estimator only needs every age class and sex somewhere in the file; ``direct_estimate`` rejects any empty cell."""
    rows = read_csv_table(filepath, COHORT_COLUMNS)
    if not rows:
        raise FileFormatError("Cohort file {} has no data rows".format(filepath))
    validated = []
    for line, row in enumerate(rows, start=2):
        try:
            validated.append(cohort_row_validator(row))
        except MultipleInvalid as e:
            raise FileFormatError(
                "Invalid cohort row on line {}: {} ({})".format(
                    line, dotted_path(e.path), e.msg
                )
            )
    return CohortCounts.from_rows(validated)


def estimate_bayes(cohort):
    """Estimate the survival table with the Bayes decomposition.

    Returns ``(SurvivalTable, SurvivalDiagnostics)``. An all-dead cohort gives an all-zero table. Raises ``EstimationError`` if an age class or sex is absent from the cohort."""
    total_survived = sum(cohort.survived(cell) for cell in CELLS)
    total = sum(cohort.total(cell) for cell in CELLS)

    if total_survived == 0:
        raw = {cell: 0.0 for cell in CELLS}
        return SurvivalTable(dict(raw)), SurvivalDiagnostics(raw_values=raw)

    by_age = {
        age_class: (
            sum(cohort.survived((age_class, sex)) for sex in Sex),
            sum(cohort.total((age_class, sex)) for sex in Sex),
        )
        for age_class in AgeClass
    }
    by_sex = {
        sex: (
            sum(cohort.survived((age_class, sex)) for age_class in AgeClass),
            sum(cohort.total((age_class, sex)) for age_class in AgeClass),
        )
        for sex in Sex
    }
    for age_class, (_, n) in by_age.items():
        if not n:
            raise EstimationError(
                "No observations for age class {}".format(age_class.value),
                cell=(age_class, None),
            )
    for sex, (_, n) in by_sex.items():
        if not n:
            raise EstimationError(
                "No observations for sex {}".format(sex.value), cell=(None, sex)
            )

    raw, table, clamped = {}, {}, []
    for cell in CELLS:
        age_class, sex = cell
        survived_age, n_age = by_age[age_class]
        survived_sex, n_sex = by_sex[sex]
        # [s_A / S] * [s_s / S] * [S / N] / ([n_A / N] * [n_s / N]), in exact integers
        value = (survived_age * survived_sex * total) / (
            n_age * n_sex * total_survived
        )
        raw[cell] = value
        table[cell] = clamp(value)
        if table[cell] != value:
            clamped.append(cell)
    return SurvivalTable(table), SurvivalDiagnostics(raw_values=raw, clamped_cells=clamped)


def direct_estimate(cohort):
    """Survival frequency per cell. Raises ``EstimationError`` naming the first empty cell."""
    table = {}
    for cell in CELLS:
        n = cohort.total(cell)
        if not n:
            raise EstimationError(
                "No observations for cell {}".format(cell_label(cell)), cell=cell
            )
        table[cell] = cohort.survived(cell) / n
    return SurvivalTable(table)


def shift_table(table, age_class, delta):
    """Add ``delta`` to both sexes of ``age_class``, clamped to ``[0, 1]``."""
    values = dict(table.p_survive)
    for sex in Sex:
        values[(age_class, sex)] = clamp(values[(age_class, sex)] + delta)
    return SurvivalTable(values)
