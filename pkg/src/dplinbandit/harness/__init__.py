"""Experiment configuration, sweeps, CSV output, plotting and the CLI."""

from .config import ExperimentConfig, parse_config
from .io import read_summary, write_csv
from .plot import emit_plot
from .sweep import SummaryRow, SweepResult, run_sweep

__all__ = [
    "ExperimentConfig",
    "SummaryRow",
    "SweepResult",
    "emit_plot",
    "parse_config",
    "read_summary",
    "run_sweep",
    "write_csv",
]
