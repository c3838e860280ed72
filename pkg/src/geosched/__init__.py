"""Preemptive scheduling with monotone costs, solved through geometric covering."""

from .gsp import (
    Constant,
    DeadlineStep,
    GspInstance,
    Job,
    Schedule,
    SquaredFlow,
    Table,
    class_interval,
    cumulative_cost,
    edf_schedule,
    schedule_cost,
)
from .pipeline import solve
from .reduction import Cover, R2cInstance, reduce_to_r2c, schedule_from_cover, verify_cover

__version__ = "0.1.0"

__all__ = [
    "Constant", "DeadlineStep", "GspInstance", "Job", "Schedule", "SquaredFlow", "Table",
    "class_interval", "cumulative_cost", "edf_schedule", "schedule_cost", "solve",
    "Cover", "R2cInstance", "reduce_to_r2c", "schedule_from_cover", "verify_cover",
]
