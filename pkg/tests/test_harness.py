import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from dplinbandit.errors import ConfigError, IoError
from dplinbandit.harness.cli import main
from dplinbandit.harness.config import ExperimentConfig, format_config, parse_config, parse_seeds
from dplinbandit.harness.io import SUMMARY_HEADER, TRACE_HEADER, read_summary, read_traces, write_csv
from dplinbandit.harness.plot import emit_plot, render_svg
from dplinbandit.harness.sweep import Cell, SummaryRow, run_cell, run_sweep, summarize, sweep_cells

SVG = "{http://www.w3.org/2000/svg}"


def small(**kw):
    base = dict(model=("central",), T=2000, epsilon_grid=(1.0,), seeds=(0,))
    base.update(kw)
    return parse_config(overrides=base)


class TestConfig:
    def test_defaults(self):
        c = parse_config()
        assert c == ExperimentConfig()
        assert (c.d, c.K, c.T) == (2, 10, 10 ** 6)
        assert c.model == ("central", "local", "shuffled", "nonprivate")
        assert c.epsilon_grid == (0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0)
        assert c.seeds == tuple(range(20)) and c.delta == 1e-6

    def test_single_point_from_flags(self):
        c = parse_config(overrides={"model": "central", "epsilon_grid": (1.0,)})
        assert len(sweep_cells(c)) == 20
        assert {cell.epsilon for cell in sweep_cells(c)} == {1.0}

    @pytest.mark.parametrize("key,value", [
        ("T", 5), ("d", 0), ("K", 1), ("delta", 1.0), ("model", "secret"),
        ("epsilon_grid", "0.1,-1"), ("seeds", "3,3"), ("noise", "cauchy"),
        ("sigma", -0.1), ("workers", 0), ("design", "random"),
    ])
    def test_invalid_field_named(self, key, value):
        with pytest.raises(ConfigError) as err:
            parse_config(overrides={key: value})
        assert err.value.field == key

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config(overrides={"horizon": 10})
        assert err.value.field == "horizon"

    def test_seed_syntax(self):
        assert parse_seeds("0-3") == (0, 1, 2, 3)
        assert parse_seeds("0..2,7") == (0, 1, 2, 7)

    def test_file_round_trip(self, tmp_path):
        c = small(model=("central", "nonprivate"), epsilon_grid=(0.1, 1.0), seeds="0-2", record_runtime=True)
        path = tmp_path / "exp.cfg"
        path.write_text("# comment\n" + format_config(c))
        assert parse_config(path) == c
        assert parse_config(path, {"T": 3000}).T == 3000

    def test_bad_file(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("T 100\n")
        with pytest.raises(ConfigError):
            parse_config(path)
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "missing.cfg")


class TestSweep:
    def test_one_cell(self):
        res = run_sweep(small())
        assert len(res.traces) == 1 and len(res.summaries) == 1
        assert res.summaries[0].num_seeds == 1 and res.summaries[0].std_regret == 0.0

    def test_nonprivate_single_column(self):
        cells = sweep_cells(small(model=("nonprivate",), epsilon_grid=(0.1, 1.0, 10.0), seeds="0-4"))
        assert len(cells) == 5 and {c.epsilon for c in cells} == {None}

    def test_default_shuffled_grid(self):
        assert len(sweep_cells(parse_config(overrides={"model": "shuffled"}))) == 140

    def test_workers_match_serial(self):
        c = small(model=("central", "shuffled"), epsilon_grid=(0.5, 1.0), seeds="0-2")
        serial, parallel = run_sweep(c), run_sweep(c, workers=2)
        assert [t.grid for t in serial.traces] == [t.grid for t in parallel.traces]

    def test_failing_cell_is_recorded(self, tmp_path):
        c = small()
        bad = run_cell(c, Cell("central", 0.0, 0))
        good = run_cell(c, Cell("central", 1.0, 0))
        assert bad.trace is None and "epsilon" in bad.error
        assert summarize([bad, good])[0].num_seeds == 1
        paths = write_csv([good.trace], summarize([bad, good]), tmp_path, failures=[bad])
        assert paths["failures"].read_text().splitlines()[1].startswith("central,0,0,ValueError")


class TestIo:
    def test_trace_lines_and_headers(self, tmp_path):
        res = run_sweep(small())
        paths = write_csv(res.traces, res.summaries, tmp_path)
        lines = paths["traces"].read_text().splitlines()
        assert len(lines) == 51
        assert lines[0] == ",".join(TRACE_HEADER)
        assert paths["summary"].read_text().splitlines()[0] == ",".join(SUMMARY_HEADER)

    def test_rewrite_is_byte_identical(self, tmp_path):
        c = small(model=("central", "local", "nonprivate"), epsilon_grid=(0.5,), seeds="0-1")
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            res = run_sweep(c)
            write_csv(res.traces, res.summaries, out)
        for name in ("traces.csv", "summary.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_summary_recomputed_from_traces(self, tmp_path):
        c = small(model=("central", "shuffled", "nonprivate"), epsilon_grid=(0.1, 1.0), seeds="0-3")
        res = run_sweep(c)
        paths = write_csv(res.traces, res.summaries, tmp_path)
        finals = {}
        for row in read_traces(paths["traces"]):
            if int(row["t"]) == int(row["T"]):
                finals.setdefault((row["model"], row["epsilon"]), []).append(float(row["cum_regret"]))
        with paths["summary"].open() as fh:
            for row in csv.DictReader(fh):
                vals = finals[(row["model"], row["epsilon"])]
                assert float(row["mean_regret"]) == pytest.approx(np.mean(vals), rel=1e-12)
                assert float(row["std_regret"]) == pytest.approx(np.std(vals), rel=1e-9, abs=1e-9)
                assert int(row["num_seeds"]) == len(vals) == 4
                assert row["mean_runtime_s"] == ""
        assert {r["delta"] for r in read_traces(paths["traces"]) if r["model"] != "shuffled"} == {""}

    def test_runtime_column_on_request(self, tmp_path):
        res = run_sweep(small())
        write_csv(res.traces, res.summaries, tmp_path, record_runtime=True)
        (row,) = read_summary(tmp_path / "summary.csv")
        assert row.mean_runtime_seconds > 0

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        res = run_sweep(small())
        with pytest.raises(IoError) as err:
            write_csv(res.traces, res.summaries, blocker / "sub")
        assert "file" in err.value.path
        with pytest.raises(IoError):
            read_summary(tmp_path / "none.csv")


def svg_counts(text):
    root = ET.fromstring(text)
    markers = root.findall(f".//{SVG}circle[@class='marker']")
    refs = root.findall(f".//{SVG}line[@class='reference']")
    series = root.findall(f".//{SVG}g[@class='series']")
    return markers, refs, series


class TestPlot:
    def test_single_point_and_reference(self, tmp_path):
        rows = [SummaryRow("central", 1.0, 100.0, 10.0, 5), SummaryRow("nonprivate", None, 90.0, 8.0, 5)]
        path = emit_plot(rows, tmp_path / "p.svg")
        markers, refs, series = svg_counts(path.read_text())
        assert len(markers) == 1 and len(refs) == 1 and len(series) == 1

    def test_series_per_model(self):
        rows = [SummaryRow(m, e, 10.0 / e, 1.0, 3) for m in ("central", "local", "shuffled") for e in (0.1, 1, 10)]
        markers, refs, series = svg_counts(render_svg(rows))
        assert len(series) == 3 and len(markers) == 9 and not refs

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            render_svg([])


class TestCli:
    def test_run_writes_outputs(self, tmp_path, capsys):
        out = tmp_path / "r"
        code = main(["run", "--model", "central", "--epsilon", "1", "--T", "2000", "--seeds", "0-1",
                     "--out", str(out), "--plot"])
        assert code == 0
        assert (out / "traces.csv").exists() and (out / "regret.svg").exists()
        assert len(read_summary(out / "summary.csv")) == 1
        assert "central" in capsys.readouterr().out

    def test_config_error_exit(self, tmp_path, capsys):
        assert main(["run", "--T", "5", "--out", str(tmp_path)]) == 1
        assert "T" in capsys.readouterr().err

    def test_bad_flag_exit(self):
        with pytest.raises(SystemExit) as err:
            main(["run", "--horizon", "10"])
        assert err.value.code == 1

    def test_runtime_error_exit(self, tmp_path, capsys):
        assert main(["plot", "--summary", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "p.svg")]) == 2

    def test_sweep_and_plot(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(f"model=central,nonprivate\nT=2000\nepsilon_grid=0.5,5\nseeds=0-1\noutput_dir={tmp_path / 'o'}\n")
        assert main(["sweep", "--config", str(cfg)]) == 0
        assert main(["plot", "--summary", str(tmp_path / "o" / "summary.csv"), "--out", str(tmp_path / "x.svg")]) == 0
        markers, refs, _ = svg_counts((tmp_path / "x.svg").read_text())
        assert len(markers) == 2 and len(refs) == 1

    def test_verify(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert out.count("[PASS]") == 6
