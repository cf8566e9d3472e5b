import struct

import numpy as np
import pytest

from tsdshap import (
    EmbeddingMatrix,
    MatrixFormatError,
    apply_pca,
    fit_pca,
    load_embedding_matrix,
    load_labels,
    reduce_dataset,
    write_embedding_matrix,
    write_labels,
)
from tsdshap.ingest import _HEADER, FORMAT_VERSION, MAGIC

from .oracles import svd_principal_axes


def _header(rows, cols, version=FORMAT_VERSION, reserved=0, magic=MAGIC):
    return _HEADER.pack(magic, version, reserved, rows, cols)


class TestBinaryFormat:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        m = EmbeddingMatrix(rng.normal(size=(7, 5)).astype(np.float32))
        path = tmp_path / "m.tsds"
        write_embedding_matrix(m, path)
        back = load_embedding_matrix(path)
        assert back.data.tobytes() == m.data.tobytes()

    def test_header_layout(self, tmp_path):
        m = EmbeddingMatrix(np.array([[1.5, -2.0, 3.25], [0.0, 4.0, -1.0]], dtype=np.float32))
        path = tmp_path / "m.tsds"
        write_embedding_matrix(m, path)
        raw = path.read_bytes()
        assert raw[:4] == b"TSDS"
        version, reserved = struct.unpack_from("<HH", raw, 4)
        n, d = struct.unpack_from("<QQ", raw, 8)
        assert (version, reserved, n, d) == (1, 0, 2, 3)
        assert raw[24:] == m.data.astype("<f4").tobytes()

    def test_zero_rows_round_trip(self, tmp_path):
        m = EmbeddingMatrix(np.zeros((0, 3), dtype=np.float32))
        path = tmp_path / "zero.tsds"
        write_embedding_matrix(m, path)
        back = load_embedding_matrix(path)
        assert back.rows == 0 and back.cols == 3

    def test_truncated_payload_names_offset(self, tmp_path):
        path = tmp_path / "short.tsds"
        path.write_bytes(_header(2, 3) + b"\x00" * 8)
        with pytest.raises(MatrixFormatError, match="byte offset 24"):
            load_embedding_matrix(path)

    def test_bad_version_names_offset(self, tmp_path):
        path = tmp_path / "v9.tsds"
        path.write_bytes(_header(1, 1, version=9) + b"\x00" * 4)
        with pytest.raises(MatrixFormatError, match="version 9 at byte offset 4"):
            load_embedding_matrix(path)

    def test_nonzero_reserved_rejected(self, tmp_path):
        path = tmp_path / "r.tsds"
        path.write_bytes(_header(1, 1, reserved=7) + b"\x00" * 4)
        with pytest.raises(MatrixFormatError, match="reserved"):
            load_embedding_matrix(path)

    def test_non_finite_payload_names_offset(self, tmp_path):
        payload = np.array([1.0, np.nan, 2.0, 3.0], dtype="<f4").tobytes()
        path = tmp_path / "nan.tsds"
        path.write_bytes(_header(2, 2) + payload)
        with pytest.raises(MatrixFormatError, match="byte offset 28"):
            load_embedding_matrix(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "stub.tsds"
        path.write_bytes(b"TSDS\x01")
        with pytest.raises(MatrixFormatError, match="truncated header"):
            load_embedding_matrix(path)


class TestCsvFormat:
    def test_parses_rows(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n")
        m = load_embedding_matrix(path)
        assert m.data.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_no_trailing_newline_ok(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0,4.0")
        assert load_embedding_matrix(path).rows == 2

    def test_ragged_row_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(MatrixFormatError, match="line 2"):
            load_embedding_matrix(path)

    def test_non_numeric_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0,x\n")
        with pytest.raises(MatrixFormatError, match="line 2"):
            load_embedding_matrix(path)

    def test_non_finite_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0\nnan\n")
        with pytest.raises(MatrixFormatError, match="line 2"):
            load_embedding_matrix(path)

    def test_interior_blank_line_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0\n\n2.0\n")
        with pytest.raises(MatrixFormatError, match="line 2"):
            load_embedding_matrix(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(MatrixFormatError, match="empty CSV"):
            load_embedding_matrix(path)


class TestLabels:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "y.txt"
        write_labels(np.array([0, 1, 1, 2]), path)
        assert path.read_text() == "0\n1\n1\n2\n"
        back = load_labels(path)
        assert back.labels.tolist() == [0, 1, 1, 2]
        assert back.num_classes == 3

    def test_non_integer_names_line(self, tmp_path):
        path = tmp_path / "y.txt"
        path.write_text("0\nfoo\n")
        with pytest.raises(MatrixFormatError, match="line 2"):
            load_labels(path)

    def test_negative_names_line(self, tmp_path):
        path = tmp_path / "y.txt"
        path.write_text("0\n-3\n")
        with pytest.raises(MatrixFormatError, match="line 2"):
            load_labels(path)

    def test_empty_file_gives_empty_vector(self, tmp_path):
        path = tmp_path / "y.txt"
        path.write_text("")
        assert len(load_labels(path)) == 0


class TestPca:
    def test_matches_svd_oracle(self, rng):
        x = rng.normal(size=(40, 6)) @ np.diag([5.0, 3.0, 2.0, 1.0, 0.5, 0.1])
        x32 = x.astype(np.float32).astype(np.float64)  # what the fit actually sees
        model = fit_pca(EmbeddingMatrix(x32), k=4)
        axes, variances = svd_principal_axes(x32, 4)
        # same spectrum
        np.testing.assert_allclose(model.explained_variance, variances, rtol=1e-8)
        # same axes up to sign
        for got, want in zip(model.components, axes):
            dot = abs(float(got @ want))
            assert dot == pytest.approx(1.0, abs=1e-8)

    def test_components_orthonormal(self, rng):
        x = rng.normal(size=(30, 5)).astype(np.float32)
        model = fit_pca(EmbeddingMatrix(x), k=5)
        gram = model.components @ model.components.T
        np.testing.assert_allclose(gram, np.eye(model.k), atol=1e-10)

    def test_prefix_property(self, rng):
        """A k-component fit is exactly the first k rows of a larger fit."""
        x = EmbeddingMatrix(rng.normal(size=(25, 6)).astype(np.float32))
        small = fit_pca(x, k=2)
        big = fit_pca(x, k=5)
        np.testing.assert_array_equal(small.components, big.components[:2])
        np.testing.assert_array_equal(small.explained_variance, big.explained_variance[:2])

    def test_k_capped_by_rank(self, rng):
        x = EmbeddingMatrix(rng.normal(size=(4, 10)).astype(np.float32))
        model = fit_pca(x, k=10)
        assert model.k == 3  # n - 1

    def test_sign_convention(self, rng):
        x = EmbeddingMatrix(rng.normal(size=(20, 4)).astype(np.float32))
        model = fit_pca(x, k=4)
        for row in model.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_rejects_tiny_input(self):
        with pytest.raises(ValueError, match="at least 2 rows"):
            fit_pca(EmbeddingMatrix(np.zeros((1, 3), dtype=np.float32)), k=1)
        with pytest.raises(ValueError, match=">= 1"):
            fit_pca(EmbeddingMatrix(np.zeros((3, 3), dtype=np.float32)), k=0)

    def test_apply_projects_float32(self, rng):
        x = EmbeddingMatrix(rng.normal(size=(12, 5)).astype(np.float32))
        model = fit_pca(x, k=2)
        out = apply_pca(model, x)
        assert out.data.dtype == np.float32
        assert out.data.shape == (12, 2)

    def test_apply_dimension_mismatch(self, rng):
        x = EmbeddingMatrix(rng.normal(size=(12, 5)).astype(np.float32))
        model = fit_pca(x, k=2)
        with pytest.raises(ValueError, match="mismatch"):
            apply_pca(model, EmbeddingMatrix(np.zeros((2, 4), dtype=np.float32)))

    def test_projection_recovers_planted_subspace(self, rng):
        # two informative directions, heavy variance; rest is small noise
        basis = np.linalg.qr(rng.normal(size=(8, 8)))[0][:, :2]
        coords = rng.normal(size=(60, 2)) * np.array([9.0, 4.0])
        x = coords @ basis.T + 0.01 * rng.normal(size=(60, 8))
        model = fit_pca(EmbeddingMatrix(x.astype(np.float32)), k=2)
        # projecting onto the fitted axes preserves nearly all variance
        projected = apply_pca(model, EmbeddingMatrix(x.astype(np.float32)))
        total = np.var(x - x.mean(0), axis=0).sum()
        kept = np.var(projected.data.astype(np.float64), axis=0).sum()
        assert kept / total > 0.999

    def test_reduce_dataset_joint_vs_train_only(self, rng):
        train = EmbeddingMatrix(rng.normal(size=(20, 6)).astype(np.float32))
        dev = EmbeddingMatrix((rng.normal(size=(8, 6)) + 5.0).astype(np.float32))
        r_train, r_dev, model = reduce_dataset(train, dev, k=3)
        assert r_train.data.shape == (20, 3) and r_dev.data.shape == (8, 3)
        assert model.k == 3
        _, _, model_t = reduce_dataset(train, dev, k=3, fit_train_only=True)
        # dev rows are offset, so the joint mean must differ from train-only
        assert not np.allclose(model.mean, model_t.mean)

    def test_reduce_dataset_dim_mismatch(self, rng):
        train = EmbeddingMatrix(rng.normal(size=(5, 4)).astype(np.float32))
        dev = EmbeddingMatrix(rng.normal(size=(5, 3)).astype(np.float32))
        with pytest.raises(ValueError, match="mismatch"):
            reduce_dataset(train, dev, k=2)
