import csv
import io
import json

import numpy as np
import pytest

from steerkit.cli import main, read_measurement_file, write_measurement_file
from steerkit.oracle import mub_qubit_measurements


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCriteriaList:
    def test_thirteen_rows(self, capsys):
        code, out, _ = run_cli(capsys, "criteria", "list")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        assert len(rows) == 1 + 13
        ids = [row[0] for row in rows[1:]]
        assert "reid-cv" in ids and "linear-3" in ids

    def test_json_array(self, capsys):
        code, out, _ = run_cli(capsys, "criteria", "list", "--format", "json")
        records = json.loads(out)
        assert code == 0
        assert isinstance(records, list) and len(records) == 13

    def test_unsupported_format_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["criteria", "list", "--format", "xml"])
        assert exc.value.code == 2


class TestEval:
    def test_werner_product_spin(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--family", "werner", "--mu", "0.8", "--criterion", "product-spin"
        )
        record = json.loads(out)
        assert code == 0
        assert record["violated"] is True
        assert record["lhs_value"] == pytest.approx(0.09, abs=1e-10)
        assert record["bound"] == pytest.approx(0.2, abs=1e-10)

    def test_gaussian_reid(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "eval", "--family", "symmetric-gaussian", "--nbar", "1", "--mu", "0.9",
            "--criterion", "reid-cv",
        )
        record = json.loads(out)
        assert code == 0
        assert record["violated"] is True
        assert record["lhs_value"] == pytest.approx(0.84, abs=1e-10)

    def test_out_of_range_mu_exits_2(self, capsys):
        code, _, err = run_cli(
            capsys, "eval", "--family", "werner", "--mu", "1.2", "--criterion", "product-spin"
        )
        assert code == 2
        assert "range" in err

    def test_unknown_criterion_exits_2(self, capsys):
        code, _, _ = run_cli(
            capsys, "eval", "--family", "werner", "--mu", "0.5", "--criterion", "bogus"
        )
        assert code == 2

    def test_kind_mismatch_exits_2(self, capsys):
        code, _, err = run_cli(
            capsys, "eval", "--family", "werner", "--mu", "0.5", "--criterion", "reid-cv"
        )
        assert code == 2
        assert "not applicable" in err

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "--family", "werner", "--mu", "0.5", "--criterion", "linear-3", "--frobnicate"])
        assert exc.value.code == 2

    def test_missing_family_parameter_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--family", "werner", "--criterion", "linear-3")
        assert code == 2
        assert "requires" in err

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "eval", "--family", "werner", "--mu", "0.8", "--criterion", "linear-3",
            "--format", "csv",
        )
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        header, values = rows
        record = dict(zip(header, values))
        assert record["violated"] == "true"
        assert float(record["lhs_value"]) == pytest.approx(0.6, abs=1e-12)


class TestSweep:
    ARGS = (
        "sweep", "--criterion", "linear-3", "--family", "werner",
        "--param", "mu", "--grid", "0:1:11",
    )

    def test_verdict_pattern(self, capsys):
        code, out, _ = run_cli(capsys, *self.ARGS)
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        assert rows[0] == ["parameter", "lhs", "bound", "margin", "violated"]
        violated = [float(r[0]) for r in rows[1:] if r[4] == "true"]
        assert violated == pytest.approx([0.6, 0.7, 0.8, 0.9, 1.0])

    def test_deterministic_output(self, capsys):
        _, first, _ = run_cli(capsys, *self.ARGS)
        _, second, _ = run_cli(capsys, *self.ARGS)
        assert first == second

    def test_threads_do_not_change_output(self, capsys, monkeypatch):
        _, reference, _ = run_cli(capsys, *self.ARGS)
        monkeypatch.setenv("STEER_THREADS", "4")
        _, threaded, _ = run_cli(capsys, *self.ARGS)
        assert threaded == reference

    def test_csv_round_trip_matches_json(self, capsys):
        _, csv_out, _ = run_cli(capsys, *self.ARGS)
        _, json_out, _ = run_cli(capsys, *self.ARGS, "--format", "json")
        csv_rows = list(csv.reader(io.StringIO(csv_out)))[1:]
        json_rows = json.loads(json_out)
        for csv_row, json_row in zip(csv_rows, json_rows):
            for value, key in zip(csv_row, ("parameter", "lhs", "bound", "margin")):
                assert abs(float(value) - json_row[key]) <= 1e-12

    def test_swept_param_conflicts_with_fixed_flag(self, capsys):
        code, _, err = run_cli(capsys, *self.ARGS, "--mu", "0.3")
        assert code == 2
        assert "conflicts" in err

    def test_empty_grid_exits_2(self, capsys):
        code, _, _ = run_cli(
            capsys,
            "sweep", "--criterion", "linear-3", "--family", "werner",
            "--param", "mu", "--grid", "0:1:0",
        )
        assert code == 2


class TestBoundary:
    def test_sum_three_spin_threshold(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "boundary", "--criterion", "sum-three-spin", "--family", "werner",
            "--param", "mu", "--tol", "1e-9",
        )
        record = json.loads(out)
        assert code == 0
        assert record["threshold"] == pytest.approx(0.577350269, abs=1e-8)

    def test_bad_bracket_exits_1(self, capsys):
        code, _, err = run_cli(
            capsys,
            "boundary", "--criterion", "linear-3", "--family", "werner",
            "--param", "mu", "--bracket", "0:0.5",
        )
        assert code == 1
        assert "verdict" in err

    def test_gain_mode_changes_collective_boundary(self, capsys):
        # Fixed gains flip at the collective bound; optimized gains reduce to
        # the conditional-variance criterion and flip at its lower boundary.
        import math

        base = (
            "boundary", "--criterion", "collective-cv-sum", "--family", "symmetric-gaussian",
            "--nbar", "1", "--param", "mu", "--tol", "1e-9",
        )
        code, out, _ = run_cli(capsys, *base)
        assert code == 0
        fixed = json.loads(out)["threshold"]
        code, out, _ = run_cli(capsys, *base, "--gain-mode", "optimize")
        assert code == 0
        optimized = json.loads(out)["threshold"]
        assert fixed == pytest.approx(5 / (4 * math.sqrt(2)), abs=1e-8)
        assert optimized == pytest.approx(math.sqrt(3) / 2, abs=1e-8)


class TestOracleCommand:
    def test_feasible_werner_04(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "oracle", "--family", "werner", "--mu", "0.4", "--measurements", "mub3", "--grid", "80",
        )
        assert code == 0
        assert out.splitlines()[0] == "feasible"

    def test_certified_werner_09(self, capsys, tmp_path):
        cert_path = tmp_path / "certificate.json"
        code, out, _ = run_cli(
            capsys,
            "oracle", "--family", "werner", "--mu", "0.9", "--measurements", "mub3",
            "--grid", "80", "--certify", "--certificate-out", str(cert_path),
        )
        assert code == 0
        assert out.splitlines()[0] == "certified-steering"
        record = json.loads(cert_path.read_text())
        assert record["verdict"] == "certified-steering"
        assert record["observed_value"] > record["lhs_bound"]
        assert len(record["functional"]) == 9

    def test_grid_infeasible_without_certify(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "oracle", "--family", "werner", "--mu", "0.9", "--measurements", "mub2", "--grid", "60",
        )
        assert code == 0
        assert out.splitlines()[0] == "grid-infeasible"

    def test_zero_grid_exits_2(self, capsys):
        code, _, _ = run_cli(
            capsys,
            "oracle", "--family", "werner", "--mu", "0.4", "--measurements", "mub3", "--grid", "0",
        )
        assert code == 2

    def test_tag_is_echoed(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "oracle", "--family", "werner", "--mu", "0.4", "--measurements", "mub2",
            "--grid", "40", "--tag", "run-7",
        )
        assert code == 0
        assert "tag=run-7" in out


class TestMeasurementFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "mub3.txt"
        original = mub_qubit_measurements(3)
        write_measurement_file(str(path), original)
        loaded = read_measurement_file(str(path))
        assert len(loaded) == 3
        for orig, back in zip(original, loaded):
            assert back.label == orig.label
            assert back.values == orig.values
            for e1, e2 in zip(orig.effects, back.effects):
                assert np.max(np.abs(e1 - e2)) < 1e-12

    def test_oracle_accepts_file(self, capsys, tmp_path):
        path = tmp_path / "mub2.txt"
        write_measurement_file(str(path), mub_qubit_measurements(2))
        code, out, _ = run_cli(
            capsys,
            "oracle", "--family", "werner", "--mu", "0.4", "--measurements", str(path), "--grid", "60",
        )
        assert code == 0
        assert out.splitlines()[0] == "feasible"

    def test_malformed_file_exits_1(self, capsys, tmp_path):
        path = tmp_path / "broken.txt"
        path.write_text("measurement X\noutcome 1\n0.5 0 0.5\n")
        code, _, _ = run_cli(
            capsys,
            "oracle", "--family", "werner", "--mu", "0.4", "--measurements", str(path), "--grid", "40",
        )
        assert code == 1


class TestFigure:
    ARGS = ("figure", "cv-bounds", "--nbar-grid", "0.5:5:10")

    def test_columns_match_closed_forms(self, capsys):
        from steerkit.gaussian import (
            boundary_collective_steering_mu,
            boundary_entanglement_mu,
            boundary_reid_steering_mu,
        )

        code, out, _ = run_cli(capsys, *self.ARGS)
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        assert rows[0] == ["nbar", "entanglement_mu", "reid_mu", "collective_mu"]
        for row in rows[1:]:
            nbar = float(row[0])
            assert float(row[1]) == pytest.approx(boundary_entanglement_mu(nbar), abs=1e-12)
            assert float(row[2]) == pytest.approx(boundary_reid_steering_mu(nbar), abs=1e-12)
            assert float(row[3]) == pytest.approx(boundary_collective_steering_mu(nbar), abs=1e-12)

    def test_deterministic(self, capsys):
        _, first, _ = run_cli(capsys, *self.ARGS)
        _, second, _ = run_cli(capsys, *self.ARGS)
        assert first == second

    def test_nonpositive_nbar_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "figure", "cv-bounds", "--nbar-grid", "0:5:10")
        assert code == 2

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "curves.csv"
        code, out, _ = run_cli(capsys, *self.ARGS, "--out", str(target))
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("nbar,")
