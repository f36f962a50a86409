"""Receding-horizon space-filling excitation signal design."""

import json

from ._core import (
    ConfigError,
    DesignerError,
    FormatError,
    SimulationDiverged,
    aprbs,
    build_regressors,
    criterion_value,
    design_signal,
    jensen_shannon,
    jsd_to_uniform,
    largest_ball_radius,
    multisine,
    quantiles,
    radius_progress,
    regressor_space,
    simulate,
    sobol,
    supporting_set,
)

__version__ = "0.1.0"


def run_experiment(config_text: str) -> dict:
    """Run a replicate batch and return the report as a dict."""
    from ._core import run_experiment_json

    return json.loads(run_experiment_json(config_text))
