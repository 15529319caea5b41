import numpy as np
import numpy.testing as npt
import pytest

from spginv import (
    InstanceSpec,
    MatrixMarketError,
    WorstCaseSpec,
    gen_rank_r,
    read_matrix,
    svd_partition,
    worst_case_build,
    write_matrix,
)


class TestGenRankR:
    def test_rank_detected_by_svd(self):
        a = gen_rank_r(InstanceSpec(m=8, n=4, r=2, density=0.5, seed=1))
        assert a.shape == (8, 4)
        assert svd_partition(a).rank == 2

    def test_deterministic_in_seed(self):
        spec = InstanceSpec(m=8, n=4, r=2, density=0.5, seed=1)
        npt.assert_array_equal(gen_rank_r(spec), gen_rank_r(spec))
        other = gen_rank_r(InstanceSpec(m=8, n=4, r=2, density=0.5, seed=2))
        assert np.abs(gen_rank_r(spec) - other).max() > 0

    def test_paper_scheme_size_class(self):
        a = gen_rank_r(InstanceSpec(m=100, n=50, r=25, seed=0))
        assert a.shape == (100, 50)
        s = np.linalg.svd(a, compute_uv=False)
        assert s[24] > 1e-6 * s[0]
        assert s[25] < 1e-10 * s[0]

    def test_invalid_rank(self):
        with pytest.raises(ValueError, match="exceeds"):
            InstanceSpec(m=5, n=4, r=5)


class TestWorstCase:
    def test_determinant_closed_form_r3(self):
        a_tilde, _ = worst_case_build(WorstCaseSpec(r=3, delta=0.1))
        det_inv = 1.0 / np.linalg.det(a_tilde)
        npt.assert_allclose(abs(det_inv), 0.01, rtol=1e-8)

    def test_inverse_block_r2(self):
        a_tilde, _ = worst_case_build(WorstCaseSpec(r=2, delta=0.1))
        npt.assert_allclose(np.linalg.inv(a_tilde), [[1.0, 1.0], [1.1, 1.0]], rtol=1e-10)
        npt.assert_allclose(np.linalg.det(np.linalg.inv(a_tilde)), -0.1, rtol=1e-8)

    def test_extra_column_has_unit_coordinates(self):
        a_tilde, a_full = worst_case_build(WorstCaseSpec(r=4, delta=0.01))
        b = a_full[:4, 4]
        npt.assert_allclose(np.linalg.solve(a_tilde, b), np.ones(4), rtol=1e-8)

    def test_embedding_shape_and_padding(self):
        _, a_full = worst_case_build(WorstCaseSpec(r=3, delta=0.1))
        assert a_full.shape == (4, 5)
        assert (a_full[3, :] == 0).all() and (a_full[:, 4] == 0).all()
        assert svd_partition(a_full).rank == 3

    def test_row_norm_closed_forms(self):
        # ||row_1 of inv|| = sqrt(r); ||row_i|| per the two families' formulas
        for r in (2, 3, 4):
            delta = 1e-4
            a_tilde, a_full = worst_case_build(WorstCaseSpec(r=r, delta=delta))
            t_inv = np.linalg.inv(a_tilde)
            rn = np.linalg.norm(t_inv, axis=1)
            npt.assert_allclose(rn[0], np.sqrt(r), rtol=1e-8)
            for i in range(2, r + 1):
                expect = np.sqrt(r + (i - 1) * i * delta
                                 + (i - 1) * i * (2 * i - 1) / 6.0 * delta ** 2)
                npt.assert_allclose(rn[i - 1], expect, rtol=1e-8)
            swapped = np.column_stack([a_full[:r, r], a_tilde[:, 1:]])
            sw_inv = np.linalg.inv(swapped)
            sw = np.linalg.norm(sw_inv, axis=1)
            npt.assert_allclose(sw[0], np.sqrt(r), rtol=1e-7)
            for i in range(2, r + 1):
                expect = np.sqrt((i - 1) * i * (2 * i - 1) / 6.0) * delta
                npt.assert_allclose(sw[i - 1], expect, rtol=1e-7)

    def test_ratio_approaches_r(self):
        for r in (2, 3, 4):
            a_tilde, a_full = worst_case_build(WorstCaseSpec(r=r, delta=1e-4))
            t_inv = np.linalg.inv(a_tilde)
            swapped = np.column_stack([a_full[:r, r], a_tilde[:, 1:]])
            ratio = (np.linalg.norm(t_inv, axis=1).sum()
                     / np.linalg.norm(np.linalg.inv(swapped), axis=1).sum())
            assert abs(ratio - r) <= 0.01 * r

    def test_zero_delta_rejected(self):
        with pytest.raises(ValueError, match="singular"):
            WorstCaseSpec(r=3, delta=0.0)

    def test_large_delta_warns(self):
        with pytest.warns(UserWarning):
            worst_case_build(WorstCaseSpec(r=3, delta=0.7))


class TestMatrixMarket:
    def test_round_trip_identity(self, tmp_path):
        path = tmp_path / "eye.mtx"
        write_matrix(path, np.eye(2))
        npt.assert_array_equal(read_matrix(path), np.eye(2))
        header = path.read_text().splitlines()[0]
        assert header == "%%MatrixMarket matrix array real general"

    def test_round_trip_full_precision(self, tmp_path):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(7, 3)) * np.pi
        path = tmp_path / "a.mtx"
        write_matrix(path, a)
        npt.assert_array_equal(read_matrix(path), a)

    def test_coordinate_format(self, tmp_path):
        path = tmp_path / "c.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real general\n"
            "% a comment\n"
            "2 3 2\n"
            "1 2 5.5\n"
            "2 3 -1.25\n")
        a = read_matrix(path)
        expect = np.zeros((2, 3))
        expect[0, 1] = 5.5
        expect[1, 2] = -1.25
        npt.assert_array_equal(a, expect)

    def test_duplicate_coordinate(self, tmp_path):
        path = tmp_path / "d.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real general\n"
            "2 2 2\n"
            "1 1 1.0\n"
            "1 1 2.0\n")
        with pytest.raises(MatrixMarketError, match=r"line 4: duplicate coordinate"):
            read_matrix(path)

    def test_zero_index(self, tmp_path):
        path = tmp_path / "z.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real general\n"
            "2 2 1\n"
            "0 1 1.0\n")
        with pytest.raises(MatrixMarketError, match=r"line 3: .*out of bounds"):
            read_matrix(path)

    def test_index_out_of_bounds(self, tmp_path):
        path = tmp_path / "o.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real general\n"
            "2 2 1\n"
            "3 1 1.0\n")
        with pytest.raises(MatrixMarketError, match=r"line 3"):
            read_matrix(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "h.mtx"
        path.write_text("%%NotMatrixMarket stuff\n1 1\n0.0\n")
        with pytest.raises(MatrixMarketError, match="line 1"):
            read_matrix(path)

    def test_complex_field_rejected(self, tmp_path):
        path = tmp_path / "f.mtx"
        path.write_text("%%MatrixMarket matrix coordinate complex general\n"
                        "1 1 1\n1 1 1.0 0.0\n")
        with pytest.raises(MatrixMarketError, match="field"):
            read_matrix(path)

    def test_bad_value_reports_line(self, tmp_path):
        path = tmp_path / "v.mtx"
        path.write_text("%%MatrixMarket matrix array real general\n"
                        "2 1\n1.0\nxyz\n")
        with pytest.raises(MatrixMarketError, match=r"line 4: invalid real"):
            read_matrix(path)

    def test_nan_rejected(self, tmp_path):
        path = tmp_path / "n.mtx"
        path.write_text("%%MatrixMarket matrix array real general\n"
                        "1 1\nnan\n")
        with pytest.raises(MatrixMarketError, match="non-finite"):
            read_matrix(path)

    def test_array_is_column_major(self, tmp_path):
        path = tmp_path / "cm.mtx"
        path.write_text("%%MatrixMarket matrix array real general\n"
                        "2 2\n1\n2\n3\n4\n")
        npt.assert_array_equal(read_matrix(path), [[1.0, 3.0], [2.0, 4.0]])

    def test_wrong_entry_count(self, tmp_path):
        path = tmp_path / "w.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n"
                        "2 2 3\n1 1 1.0\n")
        with pytest.raises(MatrixMarketError, match="expected 3 entries"):
            read_matrix(path)
