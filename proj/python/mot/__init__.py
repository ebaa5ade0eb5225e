"""Local-volatility calibration by martingale optimal transport."""

import json

from ._mot import (
    CostModel,
    MotError,
    calibrate,
    calibrate_file,
    check_convex_order,
    density_from_calls,
    gaussian_density,
    project_to_k,
)

__all__ = [
    "CostModel",
    "MotError",
    "calibrate",
    "calibrate_config",
    "calibrate_file",
    "check_convex_order",
    "density_from_calls",
    "gaussian_density",
    "project_to_k",
]


def calibrate_config(config, base_dir=""):
    """Run a calibration from a config given as a dict."""
    return calibrate(json.dumps(config), base_dir)
