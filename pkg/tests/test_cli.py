import csv
from pathlib import Path

import numpy as np
import pytest

from l0rcd.cli import main


def write_config(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def write_toy_csvs(tmp_path):
    A = tmp_path / "A.csv"
    b = tmp_path / "b.csv"
    np.savetxt(A, np.eye(2), delimiter=",")
    np.savetxt(b, np.array([2.0, 0.5]), delimiter=",")
    return str(A), str(b)


def toy_config(tmp_path, lam=0.5, solver="uq", start="zeros"):
    A, b = write_toy_csvs(tmp_path)
    return write_config(
        tmp_path,
        f"""[problem]
kind = least_squares
matrix_csv = {A}
rhs_csv = {b}
lambda = {lam}

[solve]
solver = {solver}
start = {start}
""",
    )


def read_csv(path):
    """Returns (meta dict, header list, data rows)."""
    meta, header, rows = {}, None, []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row and row[0].startswith("#"):
                meta[row[0]] = row[1] if len(row) > 1 else ""
            elif header is None:
                header = row
            else:
                rows.append(row)
    return meta, header, rows


class TestSolve:
    def test_toy_instance(self, tmp_path, capsys):
        cfg = toy_config(tmp_path)
        out = tmp_path / "out"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
        meta, header, rows = read_csv(out / "solution.csv")
        assert header == ["index", "value"]
        values = [float(r[1]) for r in rows]
        np.testing.assert_allclose(values, [2.0, 0.0])
        assert "0.625" in capsys.readouterr().out
        _, theader, trows = read_csv(out / "trace.csv")
        assert theader == ["k", "i_k", "F", "step_norm", "support_changed"]
        assert len(trows) >= 1

    def test_metadata_lines(self, tmp_path):
        cfg = toy_config(tmp_path)
        out = tmp_path / "out"
        main(["solve", "--config", cfg, "--out", str(out)])
        meta, _, _ = read_csv(out / "solution.csv")
        assert len(meta["#config_hash"]) == 16
        assert meta["#rng"] == "philox4x64"
        assert meta["#tie_rule"] == "zero"
        assert "#timestamp" in meta

    def test_no_timestamp_flag(self, tmp_path):
        cfg = toy_config(tmp_path)
        out = tmp_path / "out"
        main(["solve", "--config", cfg, "--out", str(out), "--no-timestamp"])
        meta, _, _ = read_csv(out / "solution.csv")
        assert "#timestamp" not in meta

    def test_tiny_lambda_reaches_stationarity(self, tmp_path):
        """With a negligible penalty nothing is thresholded and the run is
        plain coordinate descent: the final gradient vanishes."""
        A = tmp_path / "A.csv"
        b = tmp_path / "b.csv"
        np.savetxt(A, np.eye(3), delimiter=",")
        np.savetxt(b, np.array([1.0, 2.0, 3.0]), delimiter=",")
        cfg = write_config(
            tmp_path,
            f"[problem]\nkind = ls\nmatrix_csv = {A}\nrhs_csv = {b}\nlambda = 1e-12\n",
        )
        out = tmp_path / "out"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "solution.csv")
        x = np.array([float(r[1]) for r in rows])
        grad = x - np.array([1.0, 2.0, 3.0])
        assert np.linalg.norm(grad) <= 1e-6

    def test_zero_lambda_rejected(self, tmp_path, capsys):
        cfg = toy_config(tmp_path, lam=0.0)
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_csv_exit_2(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "[problem]\nkind = ls\nmatrix_csv = /nonexistent/A.csv\n"
            "rhs_csv = /nonexistent/b.csv\nlambda = 1\n",
        )
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_config_required(self, tmp_path, capsys):
        assert main(["solve", "--out", str(tmp_path / "o")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_solver_name(self, tmp_path):
        cfg = toy_config(tmp_path, solver="momentum")
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_exact_solver_route(self, tmp_path):
        cfg = toy_config(tmp_path, solver="ue", start="zeros")
        out = tmp_path / "out"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "solution.csv")
        np.testing.assert_allclose([float(r[1]) for r in rows], [2.0, 0.0], atol=1e-9)


class TestEnumerate:
    def test_toy_counts(self, tmp_path, capsys):
        cfg = toy_config(tmp_path)
        out = tmp_path / "out"
        assert main(["enumerate", "--config", cfg, "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "counts.csv")
        counts = {r[0]: int(r[1]) for r in rows}
        assert counts["basic"] == 4
        assert counts["uq[M=Li]"] == 1
        assert counts["uq[M=Lf]"] == 1
        assert counts["ue[beta=0.0001]"] == 1
        assert "4" in capsys.readouterr().out

    def test_builtin_example_counts(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["enumerate", "--example2", "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "counts.csv")
        counts = {r[0]: int(r[1]) for r in rows}
        assert counts == {
            "ue[beta=1e-4]": 69,
            "uq[M=Li]": 69,
            "uq[M=Lf]": 82,
            "basic": 128,
        }
        stdout = capsys.readouterr().out
        assert "128" in stdout
        assert "global minimum" in stdout

    def test_catalog_csv_shape(self, tmp_path):
        out = tmp_path / "out"
        main(["enumerate", "--example2", "--out", str(out)])
        _, header, rows = read_csv(out / "catalog.csv")
        assert header[:2] == ["support_bitmask", "F"]
        assert len(rows) == 128
        masks = [int(r[0]) for r in rows]
        assert masks == sorted(masks)

    def test_dimension_guard(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "[problem]\nkind = ls\nm = 5\nn = 30\nseed = 1\nlambda = 0.5\n",
        )
        assert main(["enumerate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "error:" in capsys.readouterr().err


class TestTournament:
    def test_all_starts_at_global(self, tmp_path):
        """With a dominating penalty the origin is the certified optimum and
        zero-density starts sit on it: every solver scores trials/trials."""
        cfg = write_config(
            tmp_path,
            """[problem]
kind = least_squares
m = 4
n = 6
seed = 3
lambda = 1

[solvers]
list = ihta,uq,ue

[starts]
trials = 2
density = 0.0
seed = 11

[sweep]
lambdas = 200
""",
        )
        out = tmp_path / "out"
        assert main(["tournament", "--config", cfg, "--out", str(out)]) == 0
        _, header, rows = read_csv(out / "tournament.csv")
        assert header == ["lambda", "F_star", "success_ihta", "success_uq", "success_ue"]
        assert len(rows) == 1
        assert [int(v) for v in rows[0][2:]] == [2, 2, 2]

    def test_sweep_emits_one_row_per_lambda(self, tmp_path):
        cfg = write_config(
            tmp_path,
            """[problem]
kind = least_squares
m = 4
n = 6
seed = 5
lambda = 1

[solvers]
list = uq

[starts]
trials = 1
seed = 2

[sweep]
lambdas = 0.01,0.07,0.09,0.15,0.35,0.8,1.2,1.8,2
""",
        )
        out = tmp_path / "out"
        assert main(["tournament", "--config", cfg, "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "tournament.csv")
        assert len(rows) == 9
        np.testing.assert_allclose(
            [float(r[0]) for r in rows],
            [0.01, 0.07, 0.09, 0.15, 0.35, 0.8, 1.2, 1.8, 2.0],
        )

    def test_sweep_required(self, tmp_path):
        cfg = write_config(
            tmp_path, "[problem]\nkind = ls\nm = 4\nn = 6\nseed = 5\nlambda = 1\n"
        )
        assert main(["tournament", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestBenchmark:
    def bench_config(self, tmp_path):
        return write_config(
            tmp_path,
            """[problem]
kind = logistic
m = 10
n = 6
seed = 9
nu = 0.5
lambda = 0.2

[solvers]
list = ihta,uq,ue

[starts]
trials = 2
seed = 4
""",
        )

    def test_schema_and_full_iteration_convention(self, tmp_path):
        cfg = self.bench_config(tmp_path)
        out = tmp_path / "out"
        assert main(["benchmark", "--config", cfg, "--out", str(out)]) == 0
        _, header, rows = read_csv(out / "benchmark.csv")
        assert header == ["solver", "F_best", "nonzeros", "iterations", "full_iterations"]
        by_name = {r[0]: r for r in rows}
        assert set(by_name) == {"ihta", "uq", "ue"}
        for name in ("uq", "ue"):
            iters = int(by_name[name][3])
            assert float(by_name[name][4]) == pytest.approx(iters / 6.0)
        assert float(by_name["ihta"][4]) == float(int(by_name["ihta"][3]))

    def test_deterministic_rerun(self, tmp_path):
        cfg = self.bench_config(tmp_path)
        outs = [tmp_path / "o1", tmp_path / "o2"]
        for o in outs:
            assert main(["benchmark", "--config", cfg, "--out", str(o), "--no-timestamp"]) == 0
        assert (outs[0] / "benchmark.csv").read_bytes() == (
            outs[1] / "benchmark.csv"
        ).read_bytes()


class TestGradcheck:
    def test_least_squares_passes(self, tmp_path):
        cfg = write_config(
            tmp_path, "[problem]\nkind = ls\nm = 8\nn = 5\nseed = 7\nlambda = 0.3\n"
        )
        out = tmp_path / "out"
        assert main(["gradcheck", "--config", cfg, "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "gradcheck.csv")
        assert all(r[-1] == "1" for r in rows)

    def test_logistic_passes(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "[problem]\nkind = logistic\nm = 8\nn = 5\nseed = 7\nnu = 0.4\nlambda = 0.3\n",
        )
        assert main(["gradcheck", "--config", cfg, "--out", str(tmp_path / "o")]) == 0


class TestReproducibility:
    def test_solve_rerun_byte_identical(self, tmp_path):
        cfg = toy_config(tmp_path)
        outs = [tmp_path / "r1", tmp_path / "r2"]
        for o in outs:
            assert main(["solve", "--config", cfg, "--out", str(o), "--no-timestamp"]) == 0
        for name in ("solution.csv", "trace.csv"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_enumerate_rerun_byte_identical(self, tmp_path):
        outs = [tmp_path / "r1", tmp_path / "r2"]
        for o in outs:
            assert main(["enumerate", "--example2", "--out", str(o), "--no-timestamp"]) == 0
        for name in ("catalog.csv", "counts.csv"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_seed_override_is_deterministic(self, tmp_path):
        cfg = toy_config(tmp_path, start="random")
        outs = [tmp_path / "s1", tmp_path / "s2"]
        for o in outs:
            assert main(
                ["solve", "--config", cfg, "--out", str(o), "--seed", "42", "--no-timestamp"]
            ) == 0
        assert (outs[0] / "solution.csv").read_bytes() == (
            outs[1] / "solution.csv"
        ).read_bytes()


class TestConfigParsing:
    def test_missing_file(self, tmp_path, capsys):
        assert main(["solve", "--config", str(tmp_path / "nope.ini")]) == 2
        assert "not found" in capsys.readouterr().err

    def test_bad_integer(self, tmp_path):
        cfg = write_config(
            tmp_path, "[problem]\nkind = ls\nm = five\nn = 6\nlambda = 1\n"
        )
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_zero_trials(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "[problem]\nkind = ls\nm = 4\nn = 4\nseed = 1\nlambda = 1\n[starts]\ntrials = 0\n",
        )
        assert main(["benchmark", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_block_sizes_must_sum(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "[problem]\nkind = ls\nm = 4\nn = 6\nseed = 1\nlambda = 1\nblock_sizes = 2,2\n",
        )
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_unknown_kind(self, tmp_path):
        cfg = write_config(tmp_path, "[problem]\nkind = quantile\nm = 4\nn = 4\n")
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_block_partition_config(self, tmp_path):
        # multivariate blocks flow through parsing, building, and solving
        cfg = write_config(
            tmp_path,
            "[problem]\nkind = ls\nm = 6\nn = 6\nseed = 2\nlambda = 0.3\n"
            "block_sizes = 2,2,2\n",
        )
        out = tmp_path / "out"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            main([])
