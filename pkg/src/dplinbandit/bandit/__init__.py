"""Private batched elimination algorithms and their shared machinery."""

from .algorithms import (
    MODELS,
    BatchRecord,
    run_central,
    run_local,
    run_model,
    run_nonprivate,
    run_shuffled,
)
from .estimation import eliminate, least_squares
from .protocol import ActionAssignment, BatchReport, ClientPool, PrivatizedReward, Shuffler
from .schedule import BatchSchedule, gamma_central, gamma_local, gamma_nonprivate, make_schedule

__all__ = [
    "MODELS",
    "ActionAssignment",
    "BatchRecord",
    "BatchReport",
    "BatchSchedule",
    "ClientPool",
    "PrivatizedReward",
    "Shuffler",
    "eliminate",
    "gamma_central",
    "gamma_local",
    "gamma_nonprivate",
    "least_squares",
    "make_schedule",
    "run_central",
    "run_local",
    "run_model",
    "run_nonprivate",
    "run_shuffled",
]
