"""CSV persistence for traces and summaries."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from ..environment import RegretTrace
from ..errors import IoError
from .sweep import CellResult, SummaryRow

TRACE_HEADER = ("model", "epsilon", "delta", "seed", "d", "K", "T", "t", "cum_regret")
SUMMARY_HEADER = ("model", "epsilon", "mean_regret", "std_regret", "num_seeds", "mean_runtime_s")
FAILURE_HEADER = ("model", "epsilon", "seed", "error")


def fmt_float(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def _open(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", encoding="utf-8", newline="")
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc


def write_traces(traces: Iterable[RegretTrace], path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for tr in traces:
            m = tr.metadata
            head = [m["model"], fmt_float(m["epsilon"]), fmt_float(m["delta"]),
                    m["seed"], m["d"], m["K"], m["T"]]
            for t, regret in tr.grid:
                w.writerow(head + [t, fmt_float(regret)])
    return path


def write_summary(summaries: Iterable[SummaryRow], path, record_runtime: bool = False) -> Path:
    """Runtime is left blank unless requested, which keeps the file reproducible."""
    path = Path(path)
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for s in summaries:
            runtime = fmt_float(s.mean_runtime_seconds) if record_runtime else ""
            w.writerow([s.model, fmt_float(s.epsilon), fmt_float(s.mean_regret),
                        fmt_float(s.std_regret), s.num_seeds, runtime])
    return path


def write_failures(failures: Iterable[CellResult], path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FAILURE_HEADER)
        for f in failures:
            w.writerow([f.cell.model, fmt_float(f.cell.epsilon), f.cell.seed, f.error])
    return path


def write_csv(traces, summaries, output_dir, *, failures=(), record_runtime: bool = False) -> dict[str, Path]:
    out = Path(output_dir)
    paths = {
        "traces": write_traces(traces, out / "traces.csv"),
        "summary": write_summary(summaries, out / "summary.csv", record_runtime),
    }
    failures = list(failures)
    if failures:
        paths["failures"] = write_failures(failures, out / "failures.csv")
    return paths


def _opt_float(text: str) -> float | None:
    return float(text) if text != "" else None


def read_summary(path) -> list[SummaryRow]:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return [
        SummaryRow(
            model=r["model"],
            epsilon=_opt_float(r["epsilon"]),
            mean_regret=float(r["mean_regret"]),
            std_regret=float(r["std_regret"]),
            num_seeds=int(r["num_seeds"]),
            mean_runtime_seconds=_opt_float(r["mean_runtime_s"]),
        )
        for r in rows
    ]


def read_traces(path) -> list[dict[str, str]]:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
