"""Python front end for the linear bandit simulation core."""

import json

from ._botw import (
    ArmSet,
    BotwError,
    entropy,
    estimate_loss,
    frank_wolfe_design,
    g_value,
    read_arm_set,
    regularized_leader,
)
from . import _botw


def run(config, base_dir=".", threads=0):
    """Run a config given as a dict or JSON string."""
    text = config if isinstance(config, str) else json.dumps(config)
    return _botw.run(text, base_dir, threads)


def sweep(config, grid, base_dir="."):
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_botw.sweep(text, list(grid), base_dir))


def verify(trace_csv, gaps):
    text = gaps if isinstance(gaps, str) else json.dumps(gaps)
    return _botw.verify(trace_csv, text)


__all__ = [
    "ArmSet",
    "BotwError",
    "entropy",
    "estimate_loss",
    "frank_wolfe_design",
    "g_value",
    "read_arm_set",
    "regularized_leader",
    "run",
    "sweep",
    "verify",
]
