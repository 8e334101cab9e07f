"""Rank stability of forecast evaluation measures on hierarchical data."""

import json

from ._rankstab import (
    ConfigError,
    DataError,
    RankstabError,
    ZeroScaleError,
    config_hash,
    mae,
    mase,
    measure_name,
    rank,
    rmsse,
    score,
    seed_demo,
    smape,
    spearman,
    validate,
    wape,
)
from ._rankstab import _run_json


def run(config, experiment=None, seed=None, splits=None, threads=None):
    """Run experiments from a JSON config and return the report as a dict (nothing is written)."""
    return json.loads(_run_json(str(config), experiment, seed, splits, threads))


__all__ = [
    "ConfigError", "DataError", "RankstabError", "ZeroScaleError", "config_hash", "mae", "mase",
    "measure_name", "rank", "rmsse", "run", "score", "seed_demo", "smape", "spearman", "validate", "wape",
]
