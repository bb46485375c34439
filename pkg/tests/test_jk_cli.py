#!/usr/bin/env python
"""
Test suite for the jk_cli.py experiment runner.

Commands run end to end against small problem sizes; outputs land in the
temporary directory the temp_output_dir fixture exports.
"""
import json
from unittest.mock import patch

import pytest
import numpy as np
import tomli

from .. import jk_cli
from ..scripts import errors

WEIGHT = ["--alpha", "1", "--beta", "0.5"]
TRAJECTORY = ["--theta", "-1", "--gamma", "-0.25", "--s0", "1", "--s1", "1.5", "--b0", "0.3", "--y0", "1.2"]


def read_summary(out_dir, stem):
    return json.loads((out_dir / f"{stem}.json").read_text(encoding="utf-8"))


class TestOutputs:
    """Files written for every command."""

    def test_recurrence_writes_three_files(self, temp_output_dir):
        """CSV, JSON summary and config snapshot share the command stem."""
        assert jk_cli.main(["recurrence", *WEIGHT, "--t", "1.5", "--n", "20"]) == 0
        for suffix in (".csv", ".json", ".config.toml"):
            assert (temp_output_dir / f"recurrence{suffix}").exists()
        summary = read_summary(temp_output_dir, "recurrence")
        assert summary["command"] == "recurrence"
        assert summary["orthonormality_residual"] <= 1e-9
        assert summary["assert_tol"] is None

    def test_config_snapshot_records_flags(self, temp_output_dir):
        """The snapshot holds the resolved config and a [run] table of flags."""
        jk_cli.main(["density", *WEIGHT, "--t", "1.5", "--n", "20", "--points", "11"])
        with (temp_output_dir / "density.config.toml").open("rb") as f:
            snapshot = tomli.load(f)
        assert snapshot["run"]["n"] == 20
        assert snapshot["run"]["command"] == "density"
        assert snapshot["weight"]["disk_radius"] == 0.6

    def test_csv_header_and_rows(self, temp_output_dir):
        """One row per grid point plus the header."""
        jk_cli.main(["density", *WEIGHT, "--t", "1.5", "--n", "20", "--points", "11"])
        lines = (temp_output_dir / "density.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "x,computed,reference,abs_err"
        assert len(lines) == 12

    def test_out_flag_overrides_env(self, temp_output_dir, tmp_path):
        """--out wins over the environment variable."""
        target = tmp_path / "elsewhere"
        jk_cli.main(["monodromy", "--theta", "-0.3", "--gamma", "0.2", "--out", str(target)])
        assert (target / "monodromy.json").exists()
        assert not (temp_output_dir / "monodromy.json").exists()

    def test_json_flag_prints_summary(self, temp_output_dir, capsys):
        """--json sends the summary to stdout."""
        jk_cli.main(["monodromy", "--theta", "-0.3", "--gamma", "0.2", "--json"])
        summary = json.loads(capsys.readouterr().out)
        assert summary["branch"] == "generic"
        assert summary["cyclic_residual"] <= 1e-12

    def test_plain_output_line(self, temp_output_dir, capsys):
        """Without --json a one-line confirmation is printed."""
        jk_cli.main(["monodromy", "--theta", "-0.3", "--gamma", "0.2"])
        assert capsys.readouterr().out.startswith("✓ monodromy: 8 rows")

    def test_config_file_changes_float_format(self, temp_output_dir, temp_config):
        """[output].float_format from --config controls CSV digits."""
        jk_cli.main(["monodromy", "--theta", "-0.3", "--gamma", "0.2", "--config", str(temp_config)])
        lines = (temp_output_dir / "monodromy.csv").read_text(encoding="utf-8").splitlines()[1:]
        for line in lines:
            for value in line.split(",")[3:]:
                mantissa = value.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
                assert len(mantissa) <= 10, value


class TestExitCodes:
    """0 on success, 2 on parameter errors, 3 on numerical breakdown, 4 on a failed gate."""

    def test_argparse_error(self, temp_output_dir, capsys):
        """Missing required flags exit with 2 and a JSON report after the usage text."""
        assert jk_cli.main(["density", *WEIGHT, "--t", "1.5"]) == 2
        err = capsys.readouterr().err
        assert err.startswith("usage:")
        report = json.loads(err.strip().splitlines()[-1])
        assert report["error"] == "ParameterError"
        assert report["exit_code"] == errors.EXIT_PARAMETER
        assert "--n" in report["message"]

    def test_unknown_flag(self, temp_output_dir, capsys):
        """Unknown flags are usage errors with the same JSON shape."""
        assert jk_cli.main(["monodromy", "--theta", "-0.3", "--gamma", "0.2", "--bogus"]) == 2
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["exit_code"] == 2
        assert "--bogus" in report["message"]

    def test_unwritable_output_dir(self, tmp_path, capsys):
        """An --out below a regular file is reported as an OutputError."""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        code = jk_cli.main(["monodromy", "--theta", "-0.3", "--gamma", "0.2",
                            "--out", str(blocker / "sub")])
        assert code == errors.EXIT_PARAMETER
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["error"] == "OutputError"
        assert report["path"].endswith("monodromy.csv")

    def test_unexpected_exception(self, temp_output_dir, capsys):
        """Anything outside the hierarchy still exits non-zero with a JSON report."""
        with patch.object(jk_cli.limits, "bulk_density_experiment", side_effect=ZeroDivisionError("boom")):
            code = jk_cli.main(["density", *WEIGHT, "--t", "1.5", "--n", "20"])
        assert code == errors.EXIT_INTERNAL
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report == {"error": "InternalError", "message": "boom", "exit_code": 1,
                          "cause": "ZeroDivisionError"}

    def test_invalid_weight(self, temp_output_dir, capsys):
        """beta <= -1 is a parameter error reported as JSON on stderr."""
        code = jk_cli.main(["density", "--beta", "-1.5", "--t", "1.5", "--n", "20"])
        assert code == errors.EXIT_PARAMETER
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["exit_code"] == 2

    def test_incomplete_painleve_params(self, temp_output_dir):
        """--theta without --gamma is rejected."""
        assert jk_cli.main(["monodromy", "--theta", "-0.3"]) == errors.EXIT_PARAMETER

    def test_fixed_t_needs_location(self, temp_output_dir):
        """fixed-t edge mode needs --t or --s."""
        assert jk_cli.main(["edge", *WEIGHT, "--n", "20"]) == errors.EXIT_PARAMETER

    def test_numerical_breakdown(self, temp_output_dir):
        """A NumericalBreakdownError subclass exits with 3."""
        with patch.object(jk_cli.limits, "bulk_density_experiment",
                          side_effect=errors.AccuracyError("quadrature did not settle")):
            assert jk_cli.main(["density", *WEIGHT, "--t", "1.5", "--n", "20"]) == errors.EXIT_NUMERICAL

    def test_failed_gate(self, temp_output_dir):
        """An error above --assert exits with 4 after writing outputs."""
        code = jk_cli.main(["density", *WEIGHT, "--t", "1.5", "--n", "20", "--assert", "1e-12"])
        assert code == errors.EXIT_TOLERANCE
        summary = read_summary(temp_output_dir, "density")
        assert summary["passed"] is False
        assert summary["gate_error"] > 1e-12

    def test_passed_gate(self, temp_output_dir):
        """A loose tolerance passes."""
        assert jk_cli.main(["monodromy", "--theta", "-1.2", "--gamma", "-0.4", "--assert", "1e-12"]) == 0
        assert read_summary(temp_output_dir, "monodromy")["passed"] is True


class TestCommands:
    """Individual commands on small inputs."""

    def test_edge_with_s_reports_maps(self, temp_output_dir):
        """--s sets t = cosh(s/4n) and adds the conformal-map data."""
        assert jk_cli.main(["edge", *WEIGHT, "--s", "2", "--n", "20", "--u-max", "2"]) == 0
        summary = read_summary(temp_output_dir, "edge")
        assert summary["edge_maps"]["s"] == pytest.approx(2.0, rel=1e-6)
        assert "outer_check" in summary

    def test_edge_merged(self, temp_output_dir):
        """t-equals-1 mode needs no location and compares with J_{alpha+beta}."""
        assert jk_cli.main(["edge", *WEIGHT, "--n", "20", "--t-mode", "t-equals-1", "--u-max", "2"]) == 0
        summary = read_summary(temp_output_dir, "edge")
        assert summary["meta"]["order"] == 1.5
        assert "edge_maps" not in summary

    def test_transition_ignores_assert(self, temp_output_dir, caplog):
        """The scan has no scalar gate, so --assert only logs a warning."""
        code = jk_cli.main(["transition", *WEIGHT, "--s", "2,0.5", "--n", "20", "--u-max", "1.5",
                            "--workers", "1", "--assert", "1e-12"])
        assert code == 0
        assert "--assert ignored" in caplog.text
        summary = read_summary(temp_output_dir, "transition")
        assert [entry["meta"]["s"] for entry in summary["scan"]] == [0.5, 2.0]

    def test_painleve_residuals(self, temp_output_dir):
        """Residuals of every reduction stay below the gate on a short trajectory."""
        code = jk_cli.main(["painleve-residuals", *TRAJECTORY, "--points", "50", "--assert", "1e-6"])
        assert code == 0
        header = (temp_output_dir / "painleve-residuals.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header.startswith("s,first_order,second_order")

    def test_fully_masked_residuals(self, temp_output_dir, caplog):
        """With every sweep point masked the gate is NaN and --assert fails."""
        nan = np.full(3, np.nan)
        names = ("first_order", "second_order", "gpv", "p3", "u_ode")
        sweep = {"s": np.array([1.1, 1.2, 1.3]), "residuals": {name: nan for name in names},
                 "max": {name: float("nan") for name in names},
                 "masked": {name: 3 for name in names}, "constraint_drift": 0.0}
        with patch.object(jk_cli.painleve, "trajectory_residuals", return_value=sweep):
            assert jk_cli.main(["painleve-residuals", *TRAJECTORY]) == 0
            assert "Every residual point was masked" in caplog.text
            code = jk_cli.main(["painleve-residuals", *TRAJECTORY, "--assert", "1e-6"])
        assert code == errors.EXIT_TOLERANCE
        summary = read_summary(temp_output_dir, "painleve-residuals")
        assert summary["passed"] is False
        assert summary["gate_error"] == "nan"

    def test_painleve_integrate(self, temp_output_dir):
        """The trajectory CSV has one row per solver step."""
        assert jk_cli.main(["painleve-integrate", *TRAJECTORY]) == 0
        summary = read_summary(temp_output_dir, "painleve-integrate")
        assert summary["stopped_at"] is None
        assert summary["s_range"] == [1.0, 1.5]

    def test_backlund(self, temp_output_dir):
        """The transformed trajectory reports gamma' = 1 - gamma and a tight round trip."""
        assert jk_cli.main(["backlund", *TRAJECTORY, "--sign", "+", "--points", "50"]) == 0
        summary = read_summary(temp_output_dir, "backlund")
        assert summary["params_tilde"]["gamma"] == pytest.approx(1.25)
        assert summary["roundtrip"] <= 1e-8

    def test_specfun_check(self, temp_output_dir, capsys):
        """Every comparison is printed and the gate passes at 1e-9."""
        assert jk_cli.main(["specfun-check", "--assert", "1e-9"]) == 0
        assert "wronskian_ik" in capsys.readouterr().out

    def test_sample_is_reproducible(self, temp_output_dir, temp_config, tmp_path):
        """Identical seeds give byte-identical CSVs."""
        argv = ["sample", *WEIGHT, "--t", "1.5", "--n", "5", "--reps", "4", "--seed", "9",
                "--config", str(temp_config)]
        assert jk_cli.main(argv) == 0
        assert jk_cli.main([*argv, "--workers", "2", "--out", str(tmp_path / "again")]) == 0
        first = (temp_output_dir / "sample.csv").read_bytes()
        second = (tmp_path / "again" / "sample.csv").read_bytes()
        assert first == second
        assert len(first.decode().splitlines()) == 21
