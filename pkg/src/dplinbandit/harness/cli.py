"""Command line entry point: ``run``, ``sweep``, ``plot`` and ``verify``.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..errors import ConfigError, DPBanditError
from .config import parse_config
from .io import read_summary, write_csv
from .plot import emit_plot
from .sweep import run_sweep
from .verify import run_checks

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dplinbandit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one sweep configured by flags")
    run.add_argument("--config", help="optional base config file; flags override it")
    run.add_argument("--model", action="append",
                     help="central, local, shuffled or nonprivate (repeatable or comma-separated)")
    run.add_argument("--d", type=int)
    run.add_argument("--K", type=int)
    run.add_argument("--T", type=int)
    run.add_argument("--epsilon", type=float, action="append", help="privacy budget (repeatable)")
    run.add_argument("--delta", type=float)
    run.add_argument("--seeds", help='e.g. "0-19" or "1,2,3"')
    run.add_argument("--noise", choices=("uniform-bounded", "truncated-gaussian"))
    run.add_argument("--sigma", type=float)
    run.add_argument("--design", choices=("core", "uniform"))
    run.add_argument("--workers", type=int)
    run.add_argument("--record-runtime", action="store_true", default=None)
    run.add_argument("--out", help="output directory")
    run.add_argument("--plot", action="store_true", help="also write regret.svg")

    sweep = sub.add_parser("sweep", help="run the sweep described by a config file")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", help="override output_dir")
    sweep.add_argument("--workers", type=int)

    plot = sub.add_parser("plot", help="render summary.csv as SVG")
    plot.add_argument("--summary", required=True)
    plot.add_argument("--out", required=True)

    sub.add_parser("verify", help="run the built-in invariant checks")
    return parser


def _overrides(args) -> dict:
    models = None
    if args.model:
        models = ",".join(args.model)
    return {
        "model": models,
        "d": args.d,
        "K": args.K,
        "T": args.T,
        "epsilon_grid": tuple(args.epsilon) if args.epsilon else None,
        "delta": args.delta,
        "seeds": args.seeds,
        "noise": args.noise,
        "sigma": args.sigma,
        "design": args.design,
        "workers": args.workers,
        "record_runtime": args.record_runtime,
        "output_dir": args.out,
    }


def _execute(config, plot: bool) -> int:
    result = run_sweep(config)
    paths = write_csv(result.traces, result.summaries, config.output_dir,
                      failures=result.failures, record_runtime=config.record_runtime)
    if plot and result.summaries:
        paths["plot"] = emit_plot(result.summaries, Path(config.output_dir) / "regret.svg")
    for s in result.summaries:
        eps = "-" if s.epsilon is None else f"{s.epsilon:g}"
        print(f"{s.model:<11} eps={eps:<6} mean={s.mean_regret:12.2f} std={s.std_regret:10.2f} n={s.num_seeds}")
    for name, path in paths.items():
        print(f"wrote {name}: {path}")
    if result.failures:
        print(f"{len(result.failures)} cell(s) failed; see failures.csv", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _execute(parse_config(args.config, _overrides(args)), args.plot)
        if args.command == "sweep":
            config = parse_config(args.config, {"output_dir": args.out, "workers": args.workers})
            return _execute(config, plot=True)
        if args.command == "plot":
            print(f"wrote plot: {emit_plot(read_summary(args.summary), args.out)}")
            return EXIT_OK
        checks = run_checks()
        for c in checks:
            print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        return EXIT_OK if all(c.passed for c in checks) else EXIT_RUNTIME
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DPBanditError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
