"""Epsilon x seed sweeps over the trust models, with per-epsilon summaries."""

from __future__ import annotations

import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ..bandit.algorithms import run_model
from ..environment import RegretTrace, generate_instance
from .config import ExperimentConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cell:
    model: str
    epsilon: float | None
    seed: int


@dataclass
class CellResult:
    cell: Cell
    trace: RegretTrace | None
    runtime_s: float
    error: str | None = None


@dataclass(frozen=True)
class SummaryRow:
    model: str
    epsilon: float | None
    mean_regret: float
    std_regret: float
    num_seeds: int
    mean_runtime_seconds: float | None = None


@dataclass
class SweepResult:
    config: ExperimentConfig
    results: list[CellResult]
    summaries: list[SummaryRow]

    @property
    def traces(self) -> list[RegretTrace]:
        return [r.trace for r in self.results if r.trace is not None]

    @property
    def failures(self) -> list[CellResult]:
        return [r for r in self.results if r.error is not None]


def sweep_cells(config: ExperimentConfig) -> list[Cell]:
    """Cells in (model, epsilon, seed) order; the baseline gets a single column."""
    cells = []
    for model in config.model:
        grid = [None] if model == "nonprivate" else list(config.epsilon_grid)
        for eps in grid:
            cells.extend(Cell(model, eps, seed) for seed in config.seeds)
    return cells


def run_cell(config: ExperimentConfig, cell: Cell) -> CellResult:
    start = time.perf_counter()
    try:
        instance = generate_instance(config.d, config.K, cell.seed, config.noise_model)
        trace = run_model(cell.model, instance, config.T, cell.seed,
                          epsilon=cell.epsilon, delta=config.delta, design=config.design)
    except Exception as exc:  # one failing cell must not sink the sweep
        log.warning("cell %s failed: %s", cell, exc)
        return CellResult(cell, None, time.perf_counter() - start, f"{type(exc).__name__}: {exc}")
    runtime = time.perf_counter() - start
    trace.metadata["runtime_s"] = runtime
    return CellResult(cell, trace, runtime)


def _run_cell_args(args):
    return run_cell(*args)


def summarize(results: list[CellResult]) -> list[SummaryRow]:
    groups: dict[tuple[str, float | None], list[CellResult]] = {}
    for r in results:
        if r.trace is not None:
            groups.setdefault((r.cell.model, r.cell.epsilon), []).append(r)
    rows = []
    for (model, eps), members in groups.items():
        finals = [m.trace.final_regret for m in members]
        rows.append(SummaryRow(
            model=model,
            epsilon=eps,
            mean_regret=statistics.fmean(finals),
            std_regret=statistics.pstdev(finals),
            num_seeds=len(finals),
            mean_runtime_seconds=statistics.fmean(m.runtime_s for m in members),
        ))
    return rows


def run_sweep(config: ExperimentConfig, workers: int | None = None) -> SweepResult:
    """Run every cell; results come back in cell order whatever the scheduling."""
    config.validate()
    cells = sweep_cells(config)
    workers = config.workers if workers is None else workers
    log.info("sweep: %d cells on %d worker(s)", len(cells), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell_args, [(config, c) for c in cells], chunksize=4))
    else:
        results = [run_cell(config, c) for c in cells]
    return SweepResult(config, results, summarize(results))
