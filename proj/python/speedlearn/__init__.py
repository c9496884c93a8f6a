"""Car speed from IMU windows and 2-D dead reckoning on synthetic drives."""

from ._core import (
    Drive,
    SpeedModel,
    SpeedlearnError,
    config_help,
    init_model,
    navigate,
    parameter_count,
    positions_to_speed,
    resolve_config,
    simulate_drive,
    simulate_run,
    train,
    wrap_angle,
)

__all__ = [
    "Drive",
    "SpeedModel",
    "SpeedlearnError",
    "config_help",
    "init_model",
    "navigate",
    "parameter_count",
    "positions_to_speed",
    "resolve_config",
    "simulate_drive",
    "simulate_run",
    "train",
    "wrap_angle",
]
