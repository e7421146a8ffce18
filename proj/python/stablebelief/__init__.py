"""Alpha-stable laws, belief functions and evidential classification."""

import json as _json

from ._core import (
    ConfigError,
    Error,
    InvalidArgument,
    Frame,
    MassFunction,
    SpectralStable2D,
    StableParams,
    cdf,
    combine_conjunctive,
    estimate_koutrouvelis,
    estimate_mcculloch,
    estimate_spectral,
    gbt_mass,
    generate,
    ks_test,
    mode,
    pdf,
    pdf_grid,
    pignistic,
    pl_stable_1d,
    projection,
    quantile,
    sample,
    sample_2d,
    version,
)
from . import _core

__version__ = version()


def run_experiment(config):
    """Run an experiment from a config dict; returns the result as a dict."""
    return _json.loads(_core.run_experiment_json(_json.dumps(config)))


__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgument",
    "Frame",
    "MassFunction",
    "SpectralStable2D",
    "StableParams",
    "cdf",
    "combine_conjunctive",
    "estimate_koutrouvelis",
    "estimate_mcculloch",
    "estimate_spectral",
    "gbt_mass",
    "generate",
    "ks_test",
    "mode",
    "pdf",
    "pdf_grid",
    "pignistic",
    "pl_stable_1d",
    "projection",
    "quantile",
    "run_experiment",
    "sample",
    "sample_2d",
]
