import numpy as np
import pytest

from spcg.core import CsrMatrix, SymHalfMatrix, build_csr_from_triplets, expand_symmetric, extract_lower
from spcg.genprob import poisson2d, random_spd
from spcg.matio import (
    FileFormatError,
    LinearSystem,
    UnsupportedFormatError,
    read_matrix_market,
    read_system,
    sniff_format,
    write_matrix_market,
    write_system,
)


def two_by_two():
    return build_csr_from_triplets([(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)], 2)


def write_text(path, text):
    path.write_text(text)
    return path


class TestMatrixMarketRead:
    def test_general(self, tmp_path):
        p = write_text(tmp_path / "g.mtx", "\n".join([
            "%%MatrixMarket matrix coordinate real general",
            "% a comment",
            "2 2 4",
            "1 1 4.0", "1 2 1.0", "2 1 1.0", "2 2 3.0", "",
        ]))
        m = read_matrix_market(p)
        assert isinstance(m, CsrMatrix)
        assert m.nnz == 4
        assert np.allclose(m.to_dense(), [[4, 1], [1, 3]])

    def test_symmetric(self, tmp_path):
        p = write_text(tmp_path / "s.mtx", "\n".join([
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 2 3",
            "1 1 4.0", "2 1 1.0", "2 2 3.0", "",
        ]))
        s = read_matrix_market(p)
        assert isinstance(s, SymHalfMatrix)
        assert s.nnz == 3
        assert expand_symmetric(s).nnz == 2 * 3 - 2

    def test_symmetric_equals_general_after_expansion(self, tmp_path):
        a = random_spd(20, 0.25, 5)
        gen_path, sym_path = tmp_path / "a.mtx", tmp_path / "b.mtx"
        write_matrix_market(a, gen_path)
        write_matrix_market(extract_lower(a), sym_path)
        from_general = read_matrix_market(gen_path)
        from_symmetric = expand_symmetric(read_matrix_market(sym_path))
        assert (from_general.row_start == from_symmetric.row_start).all()
        assert (from_general.col_idx == from_symmetric.col_idx).all()
        assert np.max(np.abs(from_general.values - from_symmetric.values)) <= 1e-15

    def test_degenerate_size_rejected(self, tmp_path):
        p = write_text(tmp_path / "z.mtx",
                       "%%MatrixMarket matrix coordinate real general\n0 0 0\n")
        with pytest.raises(FileFormatError, match="degenerate"):
            read_matrix_market(p)

    @pytest.mark.parametrize("banner", [
        "%%MatrixMarket matrix coordinate complex general",
        "%%MatrixMarket matrix coordinate pattern general",
        "%%MatrixMarket matrix array real general",
    ])
    def test_unsupported_banners(self, tmp_path, banner):
        p = write_text(tmp_path / "u.mtx", banner + "\n1 1 1\n1 1 1.0\n")
        with pytest.raises(UnsupportedFormatError):
            read_matrix_market(p)

    def test_index_out_of_bounds_reports_line(self, tmp_path):
        p = write_text(tmp_path / "o.mtx", "\n".join([
            "%%MatrixMarket matrix coordinate real general",
            "2 2 1",
            "3 1 1.0", "",
        ]))
        with pytest.raises(FileFormatError, match=":3:"):
            read_matrix_market(p)

    def test_non_square_rejected(self, tmp_path):
        p = write_text(tmp_path / "r.mtx",
                       "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1.0\n")
        with pytest.raises(FileFormatError, match="not square"):
            read_matrix_market(p)

    def test_upper_entry_in_symmetric_file_rejected(self, tmp_path):
        p = write_text(tmp_path / "up.mtx", "\n".join([
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 2 3",
            "1 1 1.0", "1 2 2.0", "2 2 1.0", "",
        ]))
        with pytest.raises(FileFormatError, match="above the diagonal"):
            read_matrix_market(p)

    def test_duplicates_summed(self, tmp_path):
        p = write_text(tmp_path / "d.mtx", "\n".join([
            "%%MatrixMarket matrix coordinate real general",
            "1 1 2",
            "1 1 1.0", "1 1 2.0", "",
        ]))
        m = read_matrix_market(p)
        assert m.nnz == 1 and m.values[0] == 3.0


class TestMatrixMarketWrite:
    def test_round_trip_general(self, tmp_path):
        a = two_by_two()
        p = tmp_path / "w.mtx"
        write_matrix_market(a, p)
        back = read_matrix_market(p)
        assert (back.row_start == a.row_start).all()
        assert (back.col_idx == a.col_idx).all()
        assert (back.values == a.values).all()

    def test_diagonal_line_count(self, tmp_path):
        eye = build_csr_from_triplets([(i, i, 1.0) for i in range(3)], 3)
        p = tmp_path / "e.mtx"
        write_matrix_market(eye, p)
        lines = p.read_text().strip().splitlines()
        assert len(lines) == 2 + 3

    def test_decimal_value_survives_bitwise(self, tmp_path):
        m = build_csr_from_triplets([(0, 0, 0.1)], 1)
        p = tmp_path / "v.mtx"
        write_matrix_market(m, p)
        assert read_matrix_market(p).values[0] == 0.1

    def test_random_values_survive_bitwise(self, tmp_path):
        a = random_spd(30, 0.2, 9)
        p = tmp_path / "rr.mtx"
        write_matrix_market(a, p)
        assert (read_matrix_market(p).values == a.values).all()


class TestSystemContainer:
    def test_round_trip_bitwise(self, tmp_path):
        a = two_by_two()
        sys_in = LinearSystem(matrix=a, b=np.array([1.0, 2.0]))
        p = tmp_path / "s.spcg"
        write_system(sys_in, p)
        out = read_system(p)
        assert isinstance(out.matrix, CsrMatrix)
        assert (out.matrix.values == a.values).all()
        assert (out.b == sys_in.b).all()
        assert out.x_ref is None

    def test_round_trip_with_xref_and_sym(self, tmp_path):
        a = extract_lower(poisson2d(4, 4))
        rng = np.random.default_rng(3)
        x_ref = rng.standard_normal(16)
        sys_in = LinearSystem(matrix=a, b=rng.standard_normal(16), x_ref=x_ref)
        p = tmp_path / "x.spcg"
        write_system(sys_in, p)
        out = read_system(p)
        assert isinstance(out.matrix, SymHalfMatrix)
        assert (out.matrix.row_start == a.row_start).all()
        assert (out.x_ref == x_ref).all()

    def test_solve_matches_stored_reference(self, tmp_path):
        from spcg.solver import cg_solve

        a = poisson2d(8, 8)
        rng = np.random.default_rng(4)
        x_ref = rng.standard_normal(64)
        b = a.to_dense() @ x_ref
        p = tmp_path / "ref.spcg"
        write_system(LinearSystem(matrix=a, b=b, x_ref=x_ref), p)
        out = read_system(p)
        report = cg_solve(out.matrix, out.b)
        assert report.converged
        assert np.max(np.abs(report.x - out.x_ref)) <= 1e-8

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.spcg"
        p.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(FileFormatError, match="magic"):
            read_system(p)

    def test_truncated(self, tmp_path):
        a = two_by_two()
        p = tmp_path / "t.spcg"
        write_system(LinearSystem(matrix=a, b=np.array([1.0, 2.0])), p)
        blob = p.read_bytes()
        p.write_bytes(blob[:-5])
        with pytest.raises(FileFormatError, match="bytes"):
            read_system(p)

    def test_header_truncated(self, tmp_path):
        p = tmp_path / "h.spcg"
        p.write_bytes(b"SPC")
        with pytest.raises(FileFormatError, match="truncated"):
            read_system(p)


class TestSniff:
    def test_extensions(self):
        assert sniff_format("a.spcg") == "spcg"
        assert sniff_format("a.mtx") == "mtx"
        assert sniff_format("weird.bin", override="spcg") == "spcg"
        with pytest.raises(FileFormatError):
            sniff_format("noext")
        with pytest.raises(FileFormatError):
            sniff_format("a.mtx", override="hdf5")
