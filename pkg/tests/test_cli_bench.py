import numpy as np
import pytest

from spcg.bench import BenchReport, run_bench, system_checksum
from spcg.cli import EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from spcg.core import build_csr_from_triplets
from spcg.matio import LinearSystem, read_system, write_matrix_market, write_system


def gen(tmp_path, *args):
    out = tmp_path / "sys.spcg"
    assert main(["gen", *args, "-o", str(out)]) == EXIT_OK
    return out


class TestGen:
    def test_poisson2d(self, tmp_path, capsys):
        path = gen(tmp_path, "--poisson2d", "3", "3", "--seed", "1")
        assert "n=9 nnz=33" in capsys.readouterr().out
        system = read_system(path)
        assert system.matrix.n == 9 and system.matrix.nnz == 33
        # b = A x_ref by construction
        assert np.allclose(system.matrix.to_dense() @ system.x_ref, system.b)

    def test_poisson3d_paper_scale_arithmetic(self, tmp_path, capsys):
        gen(tmp_path, "--poisson3d", "31", "31", "1")  # thin slab, cheap stand-in
        assert "n=961" in capsys.readouterr().out
        assert 31 * 31 * 31 == 29791

    def test_missing_kind_is_usage_error(self, tmp_path):
        assert main(["gen", "-o", str(tmp_path / "x.spcg")]) == EXIT_USAGE

    def test_random_spd_and_sym_storage(self, tmp_path):
        path = gen(tmp_path, "--random-spd", "12", "0.3", "--storage", "sym")
        system = read_system(path)
        assert system.matrix.n == 12


class TestConvert:
    def test_full_to_sym_reports_halving(self, tmp_path, capsys):
        path = gen(tmp_path, "--poisson2d", "3", "3")
        out = tmp_path / "sym.spcg"
        assert main(["convert", str(path), "--to", "sym", "-o", str(out)]) == EXIT_OK
        assert "33 -> 21" in capsys.readouterr().out

    def test_sym_full_sym_round_trip_stable(self, tmp_path):
        path = gen(tmp_path, "--poisson2d", "4", "5")
        sym1 = tmp_path / "s1.spcg"
        full = tmp_path / "f.spcg"
        sym2 = tmp_path / "s2.spcg"
        assert main(["convert", str(path), "--to", "sym", "-o", str(sym1)]) == EXIT_OK
        assert main(["convert", str(sym1), "--to", "full", "-o", str(full)]) == EXIT_OK
        assert main(["convert", str(full), "--to", "sym", "-o", str(sym2)]) == EXIT_OK
        assert sym1.read_bytes() == sym2.read_bytes()

    def test_asymmetric_to_sym_fails_naming_pair(self, tmp_path, capsys):
        m = build_csr_from_triplets([(0, 0, 1.0), (0, 1, 2.0), (1, 1, 1.0)], 2)
        p = tmp_path / "asym.mtx"
        write_matrix_market(m, p)
        code = main(["convert", str(p), "--to", "sym", "-o", str(tmp_path / "o.mtx")])
        assert code == EXIT_IO
        assert "(0, 1)" in capsys.readouterr().err

    def test_to_mm(self, tmp_path):
        path = gen(tmp_path, "--poisson2d", "3", "3")
        out = tmp_path / "m.mtx"
        assert main(["convert", str(path), "--to", "mm", "-o", str(out)]) == EXIT_OK
        assert out.read_text().startswith("%%MatrixMarket matrix coordinate real general")


class TestSolve:
    def test_identity_system(self, tmp_path, capsys):
        eye = build_csr_from_triplets([(i, i, 1.0) for i in range(4)], 4)
        p = tmp_path / "eye.spcg"
        write_system(LinearSystem(matrix=eye, b=np.arange(1.0, 5.0)), p)
        assert main(["solve", str(p)]) == EXIT_OK
        assert "iterations: 1" in capsys.readouterr().out

    def test_poisson_converges_to_reference(self, tmp_path, capsys):
        path = gen(tmp_path, "--poisson2d", "32", "32", "--seed", "3")
        assert main(["solve", str(path), "--tol", "1e-10"]) == EXIT_OK
        out = capsys.readouterr().out
        err_line = next(l for l in out.splitlines() if "inf-norm error" in l)
        assert float(err_line.split(":")[1]) <= 1e-8

    def test_max_iter_one_not_converged(self, tmp_path):
        path = gen(tmp_path, "--poisson2d", "32", "32")
        assert main(["solve", str(path), "--max-iter", "1"]) == EXIT_NUMERIC

    def test_breakdown_exit_code(self, tmp_path, capsys):
        indefinite = build_csr_from_triplets([(0, 0, 1.0), (1, 1, -1.0)], 2)
        p = tmp_path / "ind.spcg"
        write_system(LinearSystem(matrix=indefinite, b=np.array([1.0, 2.0])), p)
        assert main(["solve", str(p)]) == EXIT_NUMERIC
        assert "not positive definite" in capsys.readouterr().err

    def test_sym_storage_path(self, tmp_path):
        path = gen(tmp_path, "--poisson2d", "8", "8")
        assert main(["solve", str(path), "--storage", "sym", "--workers", "2"]) == EXIT_OK

    def test_missing_file(self, tmp_path):
        assert main(["solve", str(tmp_path / "nope.spcg")]) == EXIT_IO


class TestBench:
    def make_system(self, tmp_path, dims=("6", "6")):
        return gen(tmp_path, "--poisson2d", *dims, "--seed", "2")

    def test_text_rows_present(self, tmp_path, capsys):
        path = self.make_system(tmp_path)
        assert main(["bench", str(path), "--workers", "1,2", "--reps", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        for row in ("dotProd", "AXPY", "SpMV", "SpMV(sym)", "CG/ # int"):
            assert row in out
        assert "CG/ # int (full)" in out and "CG/ # int (sym)" in out

    def test_workers_one_speedups_are_unity(self, tmp_path):
        system = read_system(self.make_system(tmp_path))
        report = run_bench(system, workers_list=[1], reps=3)
        assert all(r.speedup == 1.0 for r in report.ops)
        assert all(r.speedup == 1.0 for r in report.cg)

    def test_reps_below_three_usage_error(self, tmp_path):
        path = self.make_system(tmp_path)
        assert main(["bench", str(path), "--reps", "2"]) == EXIT_USAGE

    def test_bad_workers_list(self, tmp_path):
        path = self.make_system(tmp_path)
        assert main(["bench", str(path), "--workers", "1,zebra"]) == EXIT_USAGE

    def test_harness_does_not_mutate_input(self, tmp_path):
        system = read_system(self.make_system(tmp_path))
        before = system_checksum(system)
        run_bench(system, workers_list=[1, 2], reps=3)
        assert system_checksum(system) == before

    def test_json_round_trip(self, tmp_path):
        system = read_system(self.make_system(tmp_path))
        report = run_bench(system, workers_list=[1, 2], reps=3)
        back = BenchReport.from_json(report.to_json())
        assert back == report

    def test_csv_round_trip(self, tmp_path):
        system = read_system(self.make_system(tmp_path))
        report = run_bench(system, workers_list=[1, 2], reps=3)
        back = BenchReport.from_csv(report.to_csv())
        assert back == report

    def test_deterministic_report_fields(self, tmp_path):
        # fixed seed, workers=1, privatized: iteration counts and final
        # residuals agree between two runs
        system = read_system(self.make_system(tmp_path))
        r1 = run_bench(system, workers_list=[1], reps=3, accumulation="privatized")
        r2 = run_bench(system, workers_list=[1], reps=3, accumulation="privatized")
        assert [(c.iterations, c.final_relative_residual) for c in r1.cg] == [
            (c.iterations, c.final_relative_residual) for c in r2.cg
        ]

    def test_backend_both(self, tmp_path, capsys):
        path = self.make_system(tmp_path)
        assert main(["bench", str(path), "--reps", "3", "--backend", "both"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "backend=python" in out

    def test_sym_input_also_benches(self, tmp_path, capsys):
        path = self.make_system(tmp_path)
        sym = tmp_path / "s.spcg"
        assert main(["convert", str(path), "--to", "sym", "-o", str(sym)]) == EXIT_OK
        capsys.readouterr()
        assert main(["bench", str(sym), "--reps", "3"]) == EXIT_OK
        assert "input=sym" in capsys.readouterr().out
