__all__ = [
    "AgeClass",
    "calibrate_defaults",
    "CohortCounts",
    "compute_lambda",
    "config",
    "ConfigDocument",
    "derive_seed",
    "direct_estimate",
    "estimate_bayes",
    "InitParams",
    "JsonWrapper",
    "ModelParams",
    "Outcome",
    "PopulationState",
    "read_cohort",
    "ReproParams",
    "run_simulation",
    "run_sweep",
    "Sex",
    "step_year",
    "SurvivalTable",
    "SweepAxis",
    "SweepSpec",
]

from .version import version as __version__

from .configuration import config
from .core import AgeClass, PopulationState, Sex
from .serialization import JsonWrapper
from .survival import (
    CohortCounts,
    SurvivalTable,
    direct_estimate,
    estimate_bayes,
    read_cohort,
)
from .lifecycle import ReproParams
from .engine import (
    InitParams,
    ModelParams,
    Outcome,
    compute_lambda,
    derive_seed,
    run_simulation,
    step_year,
)
from .experiments import SweepAxis, SweepSpec, calibrate_defaults, run_sweep
from .document import ConfigDocument
