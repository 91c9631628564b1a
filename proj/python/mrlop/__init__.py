"""Receding-horizon storage-plant controller toolkit.

Thin re-export of the compiled core: plant simulation, the adaptive
differential-evolution solver, surrogate models, the rule-based baseline and
the closed-loop run harness.
"""

from ._core import (
    GradientBoosting,
    PlantParams,
    PlantState,
    RandomForest,
    detect_reset,
    optimize,
    pinball_loss,
    plan_day,
    project_battery,
    project_pump,
    quantile,
    run_single,
    simulate,
    synth_weather,
    tank_energy_from_temp,
    tank_temp_from_energy,
    terminal_cost,
)

__all__ = [
    "GradientBoosting",
    "PlantParams",
    "PlantState",
    "RandomForest",
    "detect_reset",
    "optimize",
    "pinball_loss",
    "plan_day",
    "project_battery",
    "project_pump",
    "quantile",
    "run_single",
    "simulate",
    "synth_weather",
    "tank_energy_from_temp",
    "tank_temp_from_energy",
    "terminal_cost",
]
