"""End-to-end tests of the levy-ns command line."""
from __future__ import annotations

import json

import pytest

from levyns.cli import app as cli_app
from levyns.cli import run_cli
from levyns.core.reports import MANIFEST_NAME, ReportKind, read_report


def _manifest(out):
    return json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))


def _written(out) -> set[str]:
    return {p.relative_to(out).as_posix() for p in out.rglob("*") if p.is_file() and p.name != MANIFEST_NAME}


@pytest.fixture
def run_config(write_config, base_config_text):
    """BASE_CONFIG with a horizon of 0.1."""
    return write_config(base_config_text.replace("T = 0.0", "T = 0.1"), name="short.toml")


class TestValidate:
    """Test suite for the validate subcommand."""

    def test_valid(self, write_config, capsys):
        """A valid config prints its hash and H_theta."""
        assert run_cli(["validate", "--config", str(write_config())]) == 0
        out = capsys.readouterr().out
        assert "valid" in out
        assert "H_theta 5.6449" in out

    def test_invalid(self, write_config, base_config_text, capsys):
        """Field errors exit 2 with one stderr line each."""
        path = write_config(base_config_text.replace("theta = 1.0", "theta = 1.5"))
        assert run_cli(["validate", "--config", str(path)]) == 2
        assert "error: noise.theta" in capsys.readouterr().err

    def test_missing_config(self, capsys):
        """Commands that need a config refuse to run without one."""
        assert run_cli(["validate"]) == 2
        assert "--config" in capsys.readouterr().err


class TestSimulate:
    """Test suite for the simulate subcommand."""

    def test_zero_horizon(self, write_config, tmp_path):
        """T = 0 writes the initial state and a manifest listing every file."""
        out = tmp_path / "out"
        assert run_cli(["simulate", "--config", str(write_config()), "-o", str(out)]) == 0
        table = read_report(out / "trajectory.csv")
        assert table.kind is ReportKind.TRAJECTORY and len(table.rows) == 1
        assert (out / "snapshots" / "snapshot_00000000.csv").is_file()
        manifest = _manifest(out)
        assert manifest["complete"] is True
        assert set(manifest["files"]) == _written(out)
        assert manifest["seed"] == 7

    def test_seed_override(self, run_config, tmp_path):
        """The override is recorded and changes the path."""
        first, second = tmp_path / "a", tmp_path / "b"
        run_cli(["simulate", "--config", str(run_config), "-o", str(first)])
        run_cli(["simulate", "--config", str(run_config), "--seed-override", "8", "-o", str(second)])
        assert _manifest(second)["seed"] == 8
        assert (first / "trajectory.csv").read_bytes() != (second / "trajectory.csv").read_bytes()

    def test_blowup(self, write_config, base_config_text, tmp_path, capsys):
        """A nonfinite state exits 3 and leaves an incomplete manifest."""
        text = base_config_text.replace("T = 0.0", "T = 0.01").replace(
            'preset = "single-mode"', 'preset = "random-sobolev"\nnorm = 1e200'
        )
        out = tmp_path / "out"
        assert run_cli(["simulate", "--config", str(write_config(text)), "-o", str(out)]) == 3
        manifest = _manifest(out)
        assert manifest["complete"] is False
        assert manifest["flagged_count"] == 1
        assert "step 1" in manifest["error"]
        assert len(read_report(out / "trajectory.csv").rows) == 1
        assert "error:" in capsys.readouterr().err


class TestEnsembleCommands:
    """Test suite for ensemble-based subcommands."""

    def test_ensemble_is_reproducible(self, run_config, tmp_path):
        """Same config and seed give byte-identical reports."""
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            argv = ["ensemble", "--config", str(run_config), "-M", "3", "--horizons", "0.05,0.1",
                    "--workers", "1", "-o", str(out)]
            assert run_cli(argv) == 0
            outputs.append((out / "ensemble.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_moments(self, run_config, tmp_path):
        """The moment report writes both tables and a summary."""
        out = tmp_path / "out"
        argv = ["moments", "--config", str(run_config), "-M", "16", "--horizons", "0.05,0.1",
                "--workers", "1", "-o", str(out)]
        assert run_cli(argv) == 0
        assert len(read_report(out / "moments.csv").rows) == 2
        assert read_report(out / "gradient_moments.csv").kind is ReportKind.GRADIENT_MOMENTS
        summary = json.loads((out / "moments_summary.json").read_text(encoding="utf-8"))
        assert summary["moments"]["trajectories"] == 16
        assert set(_manifest(out)["files"]) == _written(out)

    def test_bad_horizons(self, run_config, tmp_path, capsys):
        """Horizons off the step grid are a usage error."""
        argv = ["ensemble", "--config", str(run_config), "-M", "2", "--horizons", "0.0505",
                "--workers", "1", "-o", str(tmp_path)]
        assert run_cli(argv) == 2
        assert "not a multiple" in capsys.readouterr().err

    def test_bad_mode_is_a_usage_error(self, run_config, tmp_path, capsys):
        """A CF-test mode outside the basis exits 2 before anything runs."""
        argv = ["cf-test", "--config", str(run_config), "--mode", "9", "--workers", "1", "-o", str(tmp_path)]
        assert run_cli(argv) == 2
        assert "error: --mode: mode 9 outside 1..8" in capsys.readouterr().err

    def test_computational_value_error_is_a_failure(self, run_config, tmp_path, monkeypatch, capsys):
        """A ValueError raised while computing exits 1, not as an invalid config."""
        def broken(*args, **kwargs):
            raise ValueError("singular matrix")

        monkeypatch.setattr(cli_app, "simulate_ensemble", broken)
        argv = ["ensemble", "--config", str(run_config), "-M", "2", "--horizons", "0.05,0.1",
                "--workers", "1", "-o", str(tmp_path)]
        assert run_cli(argv) == 1
        assert "error: singular matrix" in capsys.readouterr().err
        assert _manifest(tmp_path)["complete"] is False

    def test_cf_test(self, run_config, tmp_path):
        """The CF test writes cf.csv and the independence table."""
        out = tmp_path / "out"
        argv = ["cf-test", "--config", str(run_config), "-M", "8", "--xi", "1", "--pairs", "0:0.05",
                "--no-dt-halving", "--independence", "1:2", "--workers", "1", "-o", str(out)]
        assert run_cli(argv) == 0
        assert len(read_report(out / "cf.csv").rows) == 1
        assert len(read_report(out / "independence.csv").rows) == 4

    def test_invariant_windows(self, run_config, tmp_path):
        """Two windows give a measure table and one stationarity row per observable."""
        out = tmp_path / "out"
        argv = ["invariant", "--config", str(run_config), "-M", "2", "--windows", "0:0.05,0.05:0.1",
                "--stride", "10", "--permutations", "19", "--observables", "l2,mode:1",
                "--workers", "1", "-o", str(out)]
        assert run_cli(argv) == 0
        windows = {row["window"] for row in read_report(out / "measure.csv").rows}
        assert windows == {"0:0.05", "0.05:0.1"}
        assert len(read_report(out / "stationarity.csv").rows) == 2
        assert (out / "measure_summary.json").is_file()

    def test_invariant_compare(self, run_config, write_config, base_config_text, tmp_path):
        """--compare adds a sensitivity table with a baseline row."""
        other = write_config(
            base_config_text.replace("T = 0.0", "T = 0.1").replace("amplitude = 1.0", "amplitude = 2.0"),
            name="other.toml",
        )
        out = tmp_path / "out"
        argv = ["invariant", "--config", str(run_config), "-M", "2", "--stride", "10",
                "--observables", "l2", "--compare", str(other), "--workers", "1", "-o", str(out)]
        assert run_cli(argv) == 0
        rows = read_report(out / "sensitivity.csv").rows
        assert [row["baseline"] for row in rows] == ["false", "true"]


class TestStandaloneCommands:
    """Test suite for subcommands without a run config."""

    def test_sampler_test(self, tmp_path):
        """A short self-test writes its checks; the exit code reflects them."""
        out = tmp_path / "out"
        code = run_cli(["sampler-test", "--alpha", "1.5", "-N", "20000", "--seed-override", "3", "-o", str(out)])
        assert code in (0, 1)
        table = read_report(out / "sampler.csv")
        checks = [row["check"] for row in table.rows]
        assert checks[:2] == ["positive_fraction", "hill_alpha"]
        assert _manifest(out)["complete"] is True

    def test_plot_data(self, run_config, tmp_path):
        """Trajectory reports become three long-format series."""
        out = tmp_path / "out"
        assert run_cli(["simulate", "--config", str(run_config), "-o", str(out)]) == 0
        assert run_cli(["plot-data", str(out / "trajectory.csv"), "-o", str(tmp_path / "plot")]) == 0
        table = read_report(tmp_path / "plot" / "plot.csv")
        assert table.kind is ReportKind.PLOT
        assert len(table.rows) == 3 * 101
        assert {row["series"] for row in table.rows} == {"l2_norm", "h1_norm", "f_theta"}

    def test_plot_data_bad_report(self, tmp_path, capsys):
        """An unreadable report exits 1 and names the line."""
        bad = tmp_path / "bad.csv"
        bad.write_text("what,is,this\n", encoding="utf-8")
        assert run_cli(["plot-data", str(bad), "-o", str(tmp_path / "plot")]) == 1
        assert "bad.csv:1" in capsys.readouterr().err
