"""Configuration documents: shipped JSON defaults, deep-merged with user documents and validated before use."""
import copy
import json
from pathlib import Path

from voluptuous import MultipleInvalid

from .engine import InitParams, ModelParams
from .errors import ConfigurationError
from .experiments import SweepAxis, SweepSpec
from .lifecycle import ReproParams
from .serialization import JsonWrapper
from .survival import SurvivalTable
from .validate import config_validator, dotted_path

DEFAULTS_FILEPATH = Path(__file__).parent / "data" / "default_config.json"
TARGETS_FILEPATH = Path(__file__).parent / "data" / "cub_targets.csv"


def deep_merge(base, other):
    """Recursively merge ``other`` into a copy of ``base``. Non-dict values in ``other`` replace those in ``base``."""
    merged = copy.deepcopy(base)
    for key, value in other.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class ConfigDocument:
    """A validated configuration document.

    Build with ``ConfigDocument.load(filepath)`` to overlay a user document on the shipped defaults, or ``ConfigDocument(data)`` for a complete document."""

    validator = config_validator

    def __init__(self, data, filepath=None):
        self.filepath = filepath
        self.data = self.validate(data)

    def __getitem__(self, key):
        return self.data[key]

    @classmethod
    def defaults(cls):
        return JsonWrapper.load(DEFAULTS_FILEPATH)

    @classmethod
    def load(cls, filepath=None):
        """Load ``filepath`` on top of the defaults; ``None`` gives the defaults alone.

        A ``provenance`` block in the user document replaces the default one. Raises ``OSError`` if the file can't be read and ``ConfigurationError`` if it isn't a valid document."""
        data = cls.defaults()
        if filepath is not None:
            try:
                user = JsonWrapper.load(filepath)
            except json.JSONDecodeError as e:
                raise ConfigurationError(
                    "{} is not valid JSON: {}".format(filepath, e), path=""
                )
            if not isinstance(user, dict):
                raise ConfigurationError(
                    "{} must contain a JSON object".format(filepath), path=""
                )
            provenance = user.pop("provenance", None)
            data = deep_merge(data, user)
            if provenance is not None:
                data["provenance"] = provenance
        return cls(data, filepath=filepath)

    @classmethod
    def validate(cls, data):
        try:
            return cls.validator(data)
        except MultipleInvalid as e:
            error = e.errors[0]
            path = dotted_path(error.path)
            raise ConfigurationError(
                "Invalid configuration at '{}': {}".format(path, error.msg), path=path
            )

    def model_params(self):
        model = self.data["model"]
        repro = model["repro"]
        return ModelParams(
            survival=SurvivalTable.from_config(model["survival"]),
            num_ranges=model["num_ranges"],
            repro=ReproParams(
                p_repro_adult=repro["p_adult"],
                p_repro_yearling=repro["p_yearling"],
                litter_mean=repro["litter_mean"],
                litter_sd=repro["litter_sd"],
                p_sex_female=repro["p_sex_female"],
            ),
            max_age=model["max_age"],
            extinction_threshold=model["extinction_threshold"],
            max_population=model["max_population"],
            horizon=model["horizon"],
            burn_in=model["burn_in"],
            lambda_method=model.get("lambda_method", "arithmetic"),
            leave_origin=model.get("leave_origin", False),
            home_ranges=(
                tuple(model["home_ranges"]) if "home_ranges" in model else None
            ),
        )

    def init_params(self):
        return InitParams(**self.data["init"])

    def sweep_spec(self, axis=None, runs=None, base_seed=None):
        """Sweep settings from the ``sweep`` block, overridden by any argument that isn't ``None``.

        Explicit ``values`` in the document are only used for the document's own axis."""
        sweep = self.data.get("sweep", {})
        document_axis = sweep.get("axis", SweepAxis.CUB_SURVIVAL.value)
        axis = SweepAxis(axis or document_axis)
        values = sweep.get("values") if axis.value == document_axis else None
        return SweepSpec(
            axis=axis,
            values=tuple(values) if values else None,
            runs_per_scenario=runs or sweep.get("runs_per_scenario", 100),
            base_seed=base_seed if base_seed is not None else sweep.get("base_seed", 42),
        )
