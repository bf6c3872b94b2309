import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from seriate import fileio
from seriate.errors import ParseError


class TestHeatmap:
    def test_endpoints(self):
        assert fileio.heatmap_pixels([[0.0, 1.0]]).tolist() == [[0, 255]]

    def test_constant(self):
        assert fileio.heatmap_pixels([[3.0, 3.0]]).tolist() == [[128, 128]]

    def test_golden_ramp(self, tmp_path, data_dir):
        path = tmp_path / "ramp.pgm"
        fileio.write_heatmap(np.arange(16.0).reshape(4, 4), path)
        assert path.read_bytes() == (data_dir / "ramp4x4.pgm").read_bytes()

    def test_golden_rounding(self, tmp_path, data_dir):
        path = tmp_path / "round.pgm"
        fileio.write_heatmap([[0.0, 1.0, 2.0], [3.0, 4.0, 5.5]], path)
        assert path.read_bytes() == (data_dir / "rounding2x3.pgm").read_bytes()

    def test_header_is_cols_then_rows(self, tmp_path):
        path = tmp_path / "x.pgm"
        fileio.write_heatmap(np.zeros((2, 5)), path)
        assert path.read_text().splitlines()[1] == "5 2"

    def test_read_back(self, tmp_path):
        M = np.random.default_rng(0).uniform(size=(3, 7))
        fileio.write_heatmap(M, tmp_path / "m.pgm")
        assert np.array_equal(fileio.read_pgm(tmp_path / "m.pgm"), fileio.heatmap_pixels(M))


class TestMatrixCsv:
    def test_golden(self, tmp_path, data_dir):
        path = tmp_path / "m.csv"
        fileio.write_matrix_csv(path, [[0.5, -2.5, 3.0], [0.1, 0.001, 1e300]])
        assert path.read_bytes() == (data_dir / "mixed2x3.csv").read_bytes()

    def test_read_golden(self, data_dir):
        M = fileio.read_matrix_csv(data_dir / "mixed2x3.csv")
        assert M.tolist() == [[0.5, -2.5, 3.0], [0.1, 0.001, 1e300]]

    @given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
                  elements=st.floats(allow_nan=False, allow_infinity=False)))
    @settings(max_examples=100, deadline=None)
    def test_round_trip_exact(self, tmp_path_factory, M):
        path = tmp_path_factory.mktemp("csv") / "m.csv"
        fileio.write_matrix_csv(path, M)
        back = fileio.read_matrix_csv(path)
        assert back.shape == M.shape
        assert np.array_equal(back.view(np.uint64), M.view(np.uint64))

    def test_negative_zero_kept(self, tmp_path):
        fileio.write_matrix_csv(tmp_path / "z.csv", [[-0.0, 0.0]])
        assert np.signbit(fileio.read_matrix_csv(tmp_path / "z.csv")).tolist() == [[True, False]]

    def test_header_skipped(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        assert fileio.read_matrix_csv(path, header=True).tolist() == [[1, 2], [3, 4]]

    def test_parse_error_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,x\n")
        with pytest.raises(ParseError) as info:
            fileio.read_matrix_csv(path)
        assert info.value.line == 2 and info.value.column == 2

    def test_ragged(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ParseError):
            fileio.read_matrix_csv(path)

    def test_non_finite(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,nan\n")
        with pytest.raises(ParseError):
            fileio.read_matrix_csv(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ParseError):
            fileio.read_matrix_csv(path)

    def test_lf_endings(self, tmp_path):
        path = tmp_path / "m.csv"
        fileio.write_matrix_csv(path, np.eye(2))
        assert b"\r" not in path.read_bytes()


class TestPermutationCsv:
    def test_round_trip(self, tmp_path):
        fileio.write_permutation_csv(tmp_path / "p.csv", [2, 0, 1])
        assert (tmp_path / "p.csv").read_text() == "2\n0\n1\n"
        assert fileio.read_permutation_csv(tmp_path / "p.csv").tolist() == [2, 0, 1]

    def test_not_a_bijection(self, tmp_path):
        (tmp_path / "p.csv").write_text("0\n0\n")
        with pytest.raises(ParseError):
            fileio.read_permutation_csv(tmp_path / "p.csv")

    def test_not_integer(self, tmp_path):
        (tmp_path / "p.csv").write_text("0\n1.5\n")
        with pytest.raises(ParseError):
            fileio.read_permutation_csv(tmp_path / "p.csv")


def test_json_numpy_values(tmp_path):
    fileio.write_json(tmp_path / "r.json", {"a": np.arange(3), "b": np.float64(0.5), "c": np.int64(2)})
    assert json.loads((tmp_path / "r.json").read_text()) == {"a": [0, 1, 2], "b": 0.5, "c": 2}


def test_json_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        fileio.write_json(tmp_path / "r.json", {"x": float("nan")})
