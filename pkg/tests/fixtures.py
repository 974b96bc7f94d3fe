from foxpop.core import AgeClass, Sex
from foxpop.engine import InitParams, ModelParams
from foxpop.lifecycle import ReproParams
from foxpop.survival import KEY_TO_CELL, CohortCounts, SurvivalTable

COHORT_HEADER = "age_class,sex,survived,died\n"

# Cell sizes and survivor counts factor as (age class) x (sex), so age and sex are independent
independent = {
    "cub_f": (3, 17),
    "cub_m": (9, 21),
    "yearling_f": (10, 30),
    "yearling_m": (30, 30),
    "adult_f": (30, 50),
    "adult_m": (90, 30),
}

# Raw Bayes value for adult females is 0.9 * 0.9 / 0.75 = 1.08
adversarial = {
    "adult_f": (10, 0),
    "adult_m": (8, 2),
    "cub_f": (4, 1),
    "yearling_f": (4, 1),
    "cub_m": (4, 3),
    "yearling_m": (3, 4),
}

default_survival = {
    "cub_f": 0.33,
    "cub_m": 0.33,
    "yearling_f": 0.75,
    "yearling_m": 0.75,
    "adult_f": 0.77,
    "adult_m": 0.77,
}


def cohort(cells):
    return CohortCounts({KEY_TO_CELL[key]: value for key, value in cells.items()})


def cohort_csv(cells):
    return COHORT_HEADER + "".join(
        "{},{},{},{}\n".format(*key.split("_"), survived, died)
        for key, (survived, died) in cells.items()
    )


def table(**values):
    data = dict(default_survival)
    data.update(values)
    return SurvivalTable.from_config(data)


def small_model(**kwargs):
    """Fast model for tests: ten ranges, short horizon."""
    defaults = dict(
        survival=SurvivalTable.from_config(default_survival),
        num_ranges=10,
        extinction_threshold=5,
        max_population=200,
        horizon=10,
        burn_in=3,
    )
    defaults.update(kwargs)
    return ModelParams(**defaults)


def small_init(**kwargs):
    defaults = dict(n0=40)
    defaults.update(kwargs)
    return InitParams(**defaults)


certain_growth = ReproParams(
    p_repro_adult=1.0,
    p_repro_yearling=1.0,
    litter_mean=4.0,
    litter_sd=0.0,
)
