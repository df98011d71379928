"""Python access to the gprbtd detection pipeline."""

from ._gprbtd import (
    ConfigError,
    DataError,
    __version__,
    auc,
    config_dump,
    config_keys,
    platt,
    read_lane,
    roc,
    run_cli,
    simulate_lane,
)

__all__ = [
    "ConfigError",
    "DataError",
    "__version__",
    "auc",
    "config_dump",
    "config_keys",
    "platt",
    "read_lane",
    "roc",
    "run_cli",
    "simulate_lane",
]
