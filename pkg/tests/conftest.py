import pytest

from dplinbandit.harness.config import ExperimentConfig
from dplinbandit.harness.io import write_csv
from dplinbandit.harness.sweep import run_sweep

# criterion number -> (name, passed, detail), filled by test_acceptance.py
CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def report():
    def _report(number: int, name: str, passed: bool, detail: str) -> bool:
        CRITERIA[number] = (name, bool(passed), detail)
        return bool(passed)
    return _report


@pytest.fixture(scope="session")
def default_sweeps(tmp_path_factory):
    """The full default sweep, executed twice into separate directories."""
    runs = []
    for k in range(2):
        out = tmp_path_factory.mktemp(f"default_sweep_{k}")
        config = ExperimentConfig(output_dir=str(out))
        result = run_sweep(config)
        write_csv(result.traces, result.summaries, out, failures=result.failures)
        runs.append((result, out))
    return runs


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        name, passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {name}: {detail}")
