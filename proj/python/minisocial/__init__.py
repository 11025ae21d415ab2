"""Multi-robot social navigation benchmark (C++ core)."""

import json as _json

from ._core import (
    ConfigError,
    ContractError,
    Env,
    compute_metrics,
    evaluate,
    evaluate_checkpoint,
    train,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "Env",
    "compute_metrics",
    "evaluate",
    "evaluate_checkpoint",
    "train",
    "config",
]


def config(**keys):
    """Run-config JSON text from keyword arguments."""
    return _json.dumps(keys)
