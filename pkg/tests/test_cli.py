"""Command-line contract tests: exit codes, emitted file formats, byte-level
determinism, and lossless round-trips of everything written to disk."""

import csv
import json

import numpy as np
import pytest

import oracles
from focuss.cli import main
from focuss.model import (
    GeneratedDataset,
    ProblemInstance,
    dumps_dataset,
    loads_dataset,
)

DIAG_DATASET = GeneratedDataset(
    instance=ProblemInstance(oracles.SQUARE_DIAG_A, oracles.SQUARE_DIAG_X),
    p=0.8,
    planted_solution=None,
    generator="random",
    seed=0,
)

ORACLE_DATASET = GeneratedDataset(
    instance=ProblemInstance(oracles.ORACLE_EXAMPLE_A, oracles.ORACLE_EXAMPLE_X),
    p=0.5,
    planted_solution=None,
    generator="random",
    seed=0,
)


def _write_dataset(tmp_path, ds, name="data.json"):
    path = tmp_path / name
    path.write_text(dumps_dataset(ds))
    return path


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSolveCommand:
    def test_square_diagonal_fixture(self, tmp_path, capsys):
        data = _write_dataset(tmp_path, DIAG_DATASET)
        out = tmp_path / "out"
        code = main(["solve", "--input", str(data), "--out-dir", str(out)])
        assert code == 0
        solution = json.loads((out / "solution_p0.8.json").read_text())
        np.testing.assert_allclose(solution["solution"], [1.0, 1.0], atol=1e-12)
        assert solution["stop_reason"] == "step_tol"
        rows = _read_csv(out / "trace_p0.8.csv")
        assert len(rows) >= 2  # initial point plus at least one update
        assert list(rows[0]) == ["t", "cost", "residual", "step_norm", "support"]
        assert rows[0]["step_norm"] == ""  # no step produced the start

    def test_missing_input_file(self, tmp_path, capsys):
        code = main(["solve", "--input", str(tmp_path / "nope.json"),
                     "--out-dir", str(tmp_path)])
        assert code == 2
        assert "input error" in capsys.readouterr().err

    def test_malformed_dataset(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"m": 2}')
        code = main(["solve", "--input", str(bad), "--out-dir", str(tmp_path)])
        assert code == 2

    def test_iteration_budget_exhaustion_is_a_solver_error(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["solve", "--kind", "random", "--m", "6", "--n", "12",
                     "--seed", "3", "--p", "0.8", "--max-iter", "1",
                     "--out-dir", str(out)])
        assert code == 3
        assert "max_iter" in capsys.readouterr().err
        # Outputs are still written for inspection.
        assert (out / "solution_p0.8.json").exists()

    def test_trace_csv_round_trips_exactly(self, tmp_path):
        out = tmp_path / "out"
        main(["solve", "--kind", "random", "--m", "5", "--n", "10",
              "--seed", "4", "--p", "1.3", "--out-dir", str(out)])
        solution = json.loads((out / "solution_p1.3.json").read_text())
        rows = _read_csv(out / "trace_p1.3.csv")
        # repr round-trip: the parsed floats equal the binary values written.
        assert float(rows[-1]["cost"]) == solution["cost"]
        assert float(rows[-1]["residual"]) == solution["residual"]
        assert int(rows[-1]["t"]) == solution["iterations"]

    def test_p_grid_writes_one_file_per_exponent(self, tmp_path):
        out = tmp_path / "out"
        code = main(["solve", "--kind", "random", "--m", "5", "--n", "10",
                     "--seed", "4", "--p", "0.8", "--p", "1.5",
                     "--out-dir", str(out)])
        assert code == 0
        assert (out / "solution_p0.8.json").exists()
        assert (out / "solution_p1.5.json").exists()


class TestRateCommand:
    def test_contractive_regime_summary(self, tmp_path):
        out = tmp_path / "out"
        code = main(["rate", "--kind", "random", "--m", "6", "--n", "12",
                     "--seed", "3", "--p", "0.8", "--out-dir", str(out)])
        assert code == 0
        summary = json.loads((out / "summary_p0.8.json").read_text())
        assert summary["classification"] == "superlinear"
        assert summary["theory_consistent"] is True
        assert summary["support"] <= 6
        rows = _read_csv(out / "rate_p0.8.csv")
        assert list(rows[0]) == ["t", "R_t", "valid"]
        assert all(r["valid"] in ("0", "1") for r in rows)

    def test_fixed_rate_regime_summary(self, tmp_path):
        out = tmp_path / "out"
        code = main(["rate", "--kind", "random", "--m", "6", "--n", "12",
                     "--seed", "3", "--p", "1.5", "--out-dir", str(out)])
        assert code == 0
        summary = json.loads((out / "summary_p1.5.json").read_text())
        assert summary["classification"] == "linear"
        assert abs(summary["limiting_rate"] - 0.5) <= 0.05
        assert summary["theory_consistent"] is True


class TestGenCommand:
    def test_planted_dataset_certificate(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["gen", "--kind", "appendix-a", "--m", "15", "--n", "20",
                     "--p", "1.3", "--seed", "6", "--out-dir", str(out)])
        assert code == 0
        path = out / "appendix-a_m15_n20_p1.3_seed6.json"
        assert str(path) in capsys.readouterr().out
        ds = loads_dataset(path.read_text())
        assert ds.certificate <= 1e-10

    def test_infeasible_dimensions_exit_code(self, tmp_path, capsys):
        code = main(["gen", "--kind", "appendix-a", "--m", "9", "--n", "20",
                     "--p", "1.3", "--out-dir", str(tmp_path)])
        assert code == 4
        assert "infeasible dimensions" in capsys.readouterr().err

    def test_missing_kind_is_an_input_error(self, tmp_path, capsys):
        code = main(["gen", "--out-dir", str(tmp_path)])
        assert code == 2

    def test_missing_exponent_is_an_input_error(self, tmp_path, capsys):
        code = main(["gen", "--kind", "appendix-a", "--m", "15", "--n", "20",
                     "--out-dir", str(tmp_path)])
        assert code == 2

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["gen", "--kind", "appendix-b", "--m", "6", "--k", "9",
                "--n", "11", "--p", "1.5", "--seed", "7"]
        assert main(args + ["--out-dir", str(a)]) == 0
        assert main(args + ["--out-dir", str(b)]) == 0
        name = "appendix-b_m6_k9_n11_p1.5_seed7.json"
        assert (a / name).read_bytes() == (b / name).read_bytes()


class TestOracleCommand:
    def test_hand_example(self, tmp_path, capsys):
        data = _write_dataset(tmp_path, ORACLE_DATASET)
        out = tmp_path / "out"
        code = main(["oracle", "--input", str(data), "--p", "0.5",
                     "--out-dir", str(out)])
        assert code == 0
        assert "best cost" in capsys.readouterr().out
        result = json.loads((out / "oracle_p0.5.json").read_text())
        assert result["best_cost"] == pytest.approx(oracles.ORACLE_EXAMPLE_COST)
        np.testing.assert_allclose(result["best_solution"],
                                   oracles.ORACLE_EXAMPLE_BEST, atol=1e-12)

    def test_oversized_instance_is_a_solver_error(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["oracle", "--kind", "random", "--m", "3", "--n", "25",
                     "--seed", "2", "--max-n", "20", "--out-dir", str(out)])
        assert code == 3
        assert "solver error" in capsys.readouterr().err


class TestNewtonCheckCommand:
    def test_random_batch_passes(self, tmp_path, capsys):
        code = main(["newton-check", "--inits", "25", "--seed", "9",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "max step-equivalence error" in out
        assert "max block-inverse identity error" in out


class TestBenchCommand:
    def test_reports_timing_line(self, tmp_path, capsys):
        code = main(["bench", "--kind", "random", "--m", "8", "--n", "16",
                     "--seed", "3", "--p", "0.8", "--out-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "ms_per_iter" in out and "stop=step_tol" in out


class TestDeterminism:
    def test_solve_outputs_byte_identical_across_runs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["solve", "--kind", "random", "--m", "6", "--n", "12",
                "--seed", "3", "--p", "0.8"]
        assert main(args + ["--out-dir", str(a)]) == 0
        assert main(args + ["--out-dir", str(b)]) == 0
        for name in ("solution_p0.8.json", "trace_p0.8.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_rate_outputs_byte_identical_across_runs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["rate", "--kind", "random", "--m", "6", "--n", "12",
                "--seed", "3", "--p", "1.5"]
        assert main(args + ["--out-dir", str(a)]) == 0
        assert main(args + ["--out-dir", str(b)]) == 0
        for name in ("summary_p1.5.json", "rate_p1.5.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()
