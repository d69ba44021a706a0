"""
Command-line tests - subcommands, artifacts, resolved configuration and exit codes
"""
import json
import shlex
from pathlib import Path
from typing import List
import pytest
import pandas as pd
from cli import _load_run, build_parser, run_command
from config.config import McConfig, run_file_workers
from longmemory.errors import EXIT_CODES
from tests.conftest import assert_within

@pytest.fixture(scope="module")
def series_file(tmp_path_factory):
    """Rosenblatt increments, H=0.7, N=1000, seed 42, written through the CLI"""
    path = tmp_path_factory.mktemp("cli") / "y.csv"
    assert run_command(["simulate", "--process", "rosenblatt", "--h", "0.7", "--n", "1000",
                        "--seed", "42", "--output", str(path)]) == 0
    return path

@pytest.mark.cli
class TestSimulateCommand:
    """Test class for the simulate subcommand"""

    def test_writes_series_and_sidecar(self, series_file):
        lines = series_file.read_text().splitlines()
        assert len(lines) == 1000
        float(lines[0])
        sidecar = json.loads(series_file.with_suffix(".json").read_text())
        assert sidecar["process"] == "rosenblatt"
        assert sidecar["seed"] == {"master_seed": 42, "stream_index": 0}

    def test_byte_identical_reruns(self, series_file, tmp_path):
        again = tmp_path / "again.csv"
        assert run_command(["simulate", "--process", "rosenblatt", "--h", "0.7", "--n", "1000",
                            "--seed", "42", "--output", str(again)]) == 0
        assert again.read_bytes() == series_file.read_bytes()

    def test_stdout_without_output(self, capsys):
        assert run_command(["simulate", "--process", "fgn", "--h", "0.6", "--n", "50", "--seed", "1"]) == 0
        captured = capsys.readouterr()
        assert len(captured.out.splitlines()) == 50
        assert "resolved configuration" in captured.err

    def test_farima(self, tmp_path):
        path = tmp_path / "x.csv"
        assert run_command(["simulate", "--process", "farima", "--d", "0.3", "--n", "256",
                            "--farima-method", "circulant", "--output", str(path)]) == 0
        assert len(path.read_text().splitlines()) == 256

    def test_domain_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        assert run_command(["simulate", "--h", "1.2", "--output", str(path)]) == 3
        assert "error code=3 type=DomainError" in capsys.readouterr().err
        assert not path.exists()

@pytest.mark.cli
class TestEstimateCommand:
    """Test class for periodogram and estimate"""

    def test_whittle_record(self, series_file, tmp_path):
        out = tmp_path / "fit.json"
        assert run_command(["estimate", "--input", str(series_file), "--output", str(out)]) == 0
        record = json.loads(out.read_text())
        assert_within(record["H_hat"], 0.501, 0.999, "H_hat")
        assert record["C_hat"] > 0
        assert record["N"] == 1000

    def test_local_whittle_to_stdout(self, series_file, capsys):
        assert run_command(["estimate", "--input", str(series_file), "--estimator", "lw", "--lw-m", "50"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["estimator"] == "lw"
        assert record["m"] == 50

    def test_trimming_out_of_range(self, series_file, capsys):
        assert run_command(["estimate", "--input", str(series_file), "--estimator", "lw", "--lw-m", "500"]) == 3
        assert "RangeError" in capsys.readouterr().err

    def test_constant_series_exit_code(self, tmp_path):
        path = tmp_path / "flat.csv"
        path.write_text("2.0\n" * 100)
        assert run_command(["estimate", "--input", str(path)]) == 6

    def test_malformed_input_exit_code(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0\nabc\n2.0\n")
        out = tmp_path / "fit.json"
        assert run_command(["estimate", "--input", str(path), "--output", str(out)]) == 7
        assert not out.exists()

    def test_periodogram(self, series_file, tmp_path):
        out = tmp_path / "pgram.csv"
        assert run_command(["periodogram", "--input", str(series_file), "--output", str(out)]) == 0
        frame = pd.read_csv(out, comment="#")
        assert list(frame.columns) == ["k", "lambda", "ordinate"]
        assert len(frame) == 1000
        assert out.read_text().startswith("# N=1000\n")

@pytest.mark.cli
class TestAuxiliaryCommands:
    """Test class for kde, spectral-table, constants and mc"""

    def test_kde(self, tmp_path):
        sample = tmp_path / "h.csv"
        sample.write_text("".join(f"{0.7 + 0.01 * ((i * 37) % 23 - 11)}\n" for i in range(100)))
        out = tmp_path / "kde.csv"
        assert run_command(["kde", "--input", str(sample), "--grid-size", "128", "--output", str(out)]) == 0
        frame = pd.read_csv(out, comment="#")
        assert list(frame.columns) == ["x", "density"]
        assert len(frame) == 128

    def test_spectral_table(self, tmp_path):
        out = tmp_path / "spec.csv"
        assert run_command(["spectral-table", "--h", "0.75", "--points", "64", "--output", str(out)]) == 0
        frame = pd.read_csv(out, comment="#")
        assert list(frame.columns) == ["lambda", "f", "g"]
        assert len(frame) == 64

    def test_constants(self, capsys):
        assert run_command(["constants", "--h", "0.75"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["H"] == 0.75
        assert {"gamma_theorem", "gamma_proposition", "rho_theorem", "rho_proposition"} <= set(record)

    def test_mc_run_file(self, tmp_path, capsys):
        run_file = tmp_path / "run.cfg"
        run_file.write_text("process=fgn\nh_list=0.7\nn_list=128\nreps=3\nestimators=whittle\nseed=5\nworkers=1\n")
        out = tmp_path / "mc"
        assert run_command(["mc", "--config", str(run_file), "--output-dir", str(out),
                            "--formats", "json,csv"]) == 0
        assert (out / "report.json").exists()
        assert (out / "table.csv").exists()
        assert "whittle" in capsys.readouterr().out
        report = json.loads((out / "report.json").read_text())
        assert report["mc_config"]["replications"] == 3

    def test_mc_reps_override(self, tmp_path):
        run_file = tmp_path / "run.cfg"
        run_file.write_text("process=fgn\nh_list=0.7\nn_list=128\nreps=3\nestimators=lw\n")
        out = tmp_path / "mc"
        assert run_command(["mc", "--config", str(run_file), "--reps", "2", "--workers", "1",
                            "--output-dir", str(out), "--formats", "json"]) == 0
        assert json.loads((out / "report.json").read_text())["mc_config"]["replications"] == 2

    def test_mc_unknown_key(self, tmp_path):
        run_file = tmp_path / "run.cfg"
        run_file.write_text("process=fgn\ncolour=red\n")
        assert run_command(["mc", "--config", str(run_file), "--output-dir", str(tmp_path)]) == 7

    def test_mc_invalid_value(self, tmp_path):
        run_file = tmp_path / "run.cfg"
        run_file.write_text("process=fgn\nh_list=1.5\n")
        assert run_command(["mc", "--config", str(run_file), "--output-dir", str(tmp_path)]) == 3

@pytest.mark.cli
class TestUsage:
    """Test class for argument parsing and help"""

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            run_command(["estimate", "--bogus"])
        assert excinfo.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            run_command(["fit"])
        assert excinfo.value.code == 2

    def test_help_lists_defaults_and_exit_codes(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run_command(["simulate", "--help"])
        assert excinfo.value.code == 0
        text = capsys.readouterr().out
        assert "default: 1000" in text
        assert "exit codes:" in text
        for code, meaning in EXIT_CODES.items():
            assert f"{code}  {meaning}" in text

    def test_every_subcommand_registered(self):
        help_text = build_parser().format_help()
        for name in ("simulate", "periodogram", "estimate", "mc", "kde", "spectral-table", "constants"):
            assert name in help_text

README = Path(__file__).resolve().parent.parent / "README.md"

def documented_commands(section: str) -> List[List[str]]:
    """Argument lists of the `python cli.py ...` lines in the first code block under a README heading"""
    text = README.read_text(encoding="utf-8")
    block = text.split(section, 1)[1].split("```", 2)[1]
    return [shlex.split(line)[2:] for line in block.splitlines() if line.startswith("python cli.py ")]

@pytest.mark.cli
class TestDocumentedExamples:
    """Every command line in the README, run in order from a scratch directory"""

    # keeps the Monte Carlo example at desk-test cost
    MC_OVERRIDES = ["--reps", "2", "--formats", "json,csv"]

    def test_readme_lists_every_subcommand(self):
        names = {argv[0] for argv in documented_commands("### Command Line")}
        assert names == {"simulate", "periodogram", "estimate", "mc", "kde", "spectral-table", "constants"}

    def test_readme_commands_succeed(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "estimates.csv").write_text("".join(f"{0.7 + 0.002 * ((i * 37) % 41 - 20)!r}\n"
                                                        for i in range(200)))
        for argv in documented_commands("### Command Line"):
            if argv[0] == "mc":
                argv = argv + self.MC_OVERRIDES
            assert run_command(argv) == 0, " ".join(argv)
        capsys.readouterr()
        assert (tmp_path / "y.csv").exists() and (tmp_path / "y.json").exists()
        assert len(pd.read_csv(tmp_path / "pgram.csv", comment="#")) == 1000
        assert len(pd.read_csv(tmp_path / "kde.csv", comment="#")) == 512
        report = json.loads((tmp_path / "reports" / "table1" / "report.json").read_text())
        assert report["mc_config"]["replications"] == 2
        assert (tmp_path / "reports" / "table1" / "table.csv").exists()

    def test_readme_run_file_parses(self, tmp_path):
        block = README.read_text(encoding="utf-8").split("### Run Files", 1)[1].split("```", 2)[1]
        path = tmp_path / "run.cfg"
        path.write_text(block.strip() + "\n")
        run = McConfig.from_file(str(path))
        assert run.H_list == [0.55, 0.65, 0.75, 0.85, 0.95]
        assert run.replications == 100
        assert run_file_workers(str(path)) == 4

@pytest.mark.cli
class TestRunSources:
    """Test class for how mc resolves --config and --preset"""

    def test_config_name_falls_back_to_preset(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        args = build_parser().parse_args(["mc", "--config", "table1.cfg"])
        assert _load_run(args) == McConfig.preset("table1")

    def test_local_file_wins_over_preset(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "table1.cfg").write_text("process=fgn\nh_list=0.7\nn_list=128\nreps=3\n")
        run = _load_run(build_parser().parse_args(["mc", "--config", "table1.cfg"]))
        assert run.process == "fgn"
        assert run.replications == 3

    def test_missing_run_file(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert run_command(["mc", "--config", "absent.cfg", "--output-dir", str(tmp_path)]) == 7
        assert "run file not found" in capsys.readouterr().err

    def test_config_name_runs_preset(self, tmp_path, monkeypatch):
        """`mc --config table1.cfg` with a replication override"""
        monkeypatch.chdir(tmp_path)
        assert run_command(["mc", "--config", "table1.cfg", "--reps", "2", "--workers", "1",
                            "--output-dir", "out", "--formats", "json"]) == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert report["mc_config"]["H_list"] == [0.55, 0.65, 0.75, 0.85, 0.95]
        assert report["mc_config"]["replications"] == 2
