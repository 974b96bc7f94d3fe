from numbers import Number

from voluptuous import (
    All,
    Any,
    Coerce,
    In,
    Invalid,
    Length,
    Optional,
    Range,
    Required,
    Schema,
)

SURVIVAL_KEYS = ("cub_f", "cub_m", "yearling_f", "yearling_m", "adult_f", "adult_m")
SWEEP_AXES = ("initial-n", "cub-survival", "yearling-survival", "adult-survival")
SURVIVAL_AXES = SWEEP_AXES[1:]
FOOD_LEVELS = ("poor", "medium", "rich")
LAMBDA_METHODS = ("arithmetic", "geometric")


def number(obj):
    if isinstance(obj, bool) or not isinstance(obj, Number):
        raise Invalid("{!r} is not a number".format(obj))
    return obj


def integer(obj):
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise Invalid("{!r} is not an integer".format(obj))
    return obj


probability = All(number, Range(min=0, max=1))
count = All(integer, Range(min=0))
seed = All(integer, Range(min=0, max=2**64 - 1))


def model_constraints(data):
    if data["extinction_threshold"] >= data["max_population"]:
        raise Invalid(
            "extinction_threshold must be smaller than max_population",
            path=["extinction_threshold"],
        )
    if data["horizon"] <= data["burn_in"]:
        raise Invalid("horizon must be larger than burn_in", path=["burn_in"])
    if "home_ranges" in data and len(data["home_ranges"]) != data["num_ranges"]:
        raise Invalid(
            "{} home ranges given but num_ranges is {}".format(
                len(data["home_ranges"]), data["num_ranges"]
            ),
            path=["home_ranges"],
        )
    return data


def init_constraints(data):
    total = data["prop_adult"] + data["prop_yearling"] + data["prop_cub"]
    if abs(total - 1) > 1e-9:
        raise Invalid(
            "proportions sum to {}, not 1".format(total),
            path=["prop_*"],
        )
    if data["n0"] > 0 and data["prop_adult"] + data["prop_yearling"] <= 0:
        raise Invalid(
            "n0 > 0 needs a positive adult or yearling proportion",
            path=["prop_*"],
        )
    if data["adult_age_min"] > data["adult_age_max"]:
        raise Invalid(
            "adult_age_min is larger than adult_age_max", path=["adult_age_min"]
        )
    return data


survival_table = {Required(key): probability for key in SURVIVAL_KEYS}

repro = {
    Required("p_adult"): probability,
    Required("p_yearling"): probability,
    Required("litter_mean"): number,
    Required("litter_sd"): All(number, Range(min=0)),
    Required("p_sex_female"): probability,
}

home_range = {
    Optional("x"): All([number], Length(min=2, max=2)),
    Optional("food"): In(FOOD_LEVELS),
}

model = All(
    {
        Required("num_ranges"): All(integer, Range(min=1)),
        Required("survival"): survival_table,
        Required("repro"): repro,
        Required("max_age"): All(integer, Range(min=1, max=12)),
        Required("extinction_threshold"): count,
        Required("max_population"): All(integer, Range(min=1)),
        Required("horizon"): All(integer, Range(min=1)),
        Required("burn_in"): count,
        Optional("lambda_method"): In(LAMBDA_METHODS),
        Optional("leave_origin"): bool,
        Optional("home_ranges"): [home_range],
    },
    model_constraints,
)

init = All(
    {
        Required("n0"): count,
        Required("prop_adult"): probability,
        Required("prop_yearling"): probability,
        Required("prop_cub"): probability,
        Required("adult_age_min"): All(integer, Range(min=2, max=12)),
        Required("adult_age_max"): All(integer, Range(min=2, max=12)),
    },
    init_constraints,
)

sweep = {
    Optional("axis"): In(SWEEP_AXES),
    Optional("values"): All([number], Length(min=1)),
    Optional("runs_per_scenario"): All(integer, Range(min=1)),
    Optional("base_seed"): seed,
}

config_validator = Schema(
    {
        Required("model"): model,
        Required("init"): init,
        Optional("sweep"): sweep,
        Optional("provenance"): dict,
    }
)

cohort_row_validator = Schema(
    {
        Required("age_class"): In(("cub", "yearling", "adult")),
        Required("sex"): In(("f", "m")),
        Required("survived"): All(Coerce(int), Range(min=0)),
        Required("died"): All(Coerce(int), Range(min=0)),
    }
)

target_row_validator = Schema(
    {
        Required("axis"): In(SURVIVAL_AXES),
        Required("delta"): Coerce(float),
        Required("pct_extinct"): All(Coerce(float), Range(min=0, max=1)),
        Required("pct_max_limit"): Any(
            All("", lambda x: None), All(Coerce(float), Range(min=0, max=1))
        ),
    }
)


def dotted_path(path):
    """``['init', 'prop_*']`` becomes ``'init.prop_*'``; list indices are kept as numbers."""
    return ".".join(str(x) for x in path)
