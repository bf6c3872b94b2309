import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from seriate import matcore
from seriate.errors import (
    BadShape,
    DegenerateRange,
    NegativeEntry,
    NonFinite,
    NotSymmetric,
    RankDeficient,
    SizeMismatch,
    ZeroMatrix,
    ZeroSpectrum,
)


def seeded(seed, shape):
    return np.random.default_rng(seed).standard_normal(shape)


@st.composite
def permuted_matrices(draw, max_side=20):
    n = draw(st.integers(1, max_side))
    p = draw(st.integers(1, max_side))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, p)), rng.permutation(n), rng.permutation(p)


class TestPermutations:
    def test_apply_gathers(self):
        M = np.arange(6.0).reshape(2, 3)
        out = matcore.apply_permutation(M, [1, 0], [2, 0, 1])
        assert out.tolist() == [[5, 3, 4], [2, 0, 1]]

    def test_identity_leaves_matrix(self):
        M = seeded(0, (3, 4))
        assert np.array_equal(matcore.apply_permutation(M, matcore.identity_permutation(3),
                                                        matcore.identity_permutation(4)), M)

    def test_rejects_non_bijection(self):
        with pytest.raises(BadShape):
            matcore.as_permutation([0, 0, 1])

    def test_rejects_wrong_size(self):
        with pytest.raises(SizeMismatch):
            matcore.apply_permutation(np.eye(3), [0, 1], [0, 1, 2])

    @given(permuted_matrices())
    @settings(max_examples=60, deadline=None)
    def test_inverse_round_trip(self, case):
        M, p, q = case
        once = matcore.apply_permutation(M, p, q)
        back = matcore.apply_permutation(once, matcore.invert_permutation(p), matcore.invert_permutation(q))
        assert np.array_equal(back, M)

    def test_flip(self):
        assert matcore.flip_permutation([2, 0, 1]).tolist() == [1, 0, 2]


class TestTransforms:
    def test_normalize_example(self):
        out = matcore.normalize_unit_range([[2.0, 4.0], [6.0, 10.0]])
        assert out.tolist() == [[0.0, 0.25], [0.5, 1.0]]

    def test_normalize_constant(self):
        with pytest.raises(DegenerateRange):
            matcore.normalize_unit_range([[3.0, 3.0]])

    @given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 12), st.floats(1e-3, 1e6))
    @settings(max_examples=100, deadline=None)
    def test_normalize_hits_exact_ends(self, seed, n, p, scale):
        M = scale * seeded(seed, (n, p)) + 7.0
        if M.max() == M.min():
            return
        out = matcore.normalize_unit_range(M)
        assert out.min() == 0.0 and out.max() == 1.0

    def test_log1p(self):
        out = matcore.log1p_transform([[0.0, math.e - 1]])
        assert out[0, 0] == 0.0 and out[0, 1] == pytest.approx(1.0, abs=1e-15)

    def test_log1p_negative(self):
        with pytest.raises(NegativeEntry):
            matcore.log1p_transform([[0.0, -1.0]])

    def test_as_matrix_rejects_nan(self):
        with pytest.raises(NonFinite):
            matcore.as_matrix([[1.0, float("nan")]])


class TestArgsort:
    def test_stable_ties(self):
        assert matcore.argsort([0.3, 0.1, 0.3, 0.1]).tolist() == [1, 3, 0, 2]

    def test_nan_rejected(self):
        with pytest.raises(NonFinite):
            matcore.argsort([0.0, float("nan")])


class TestDistances:
    def test_identical_rows(self):
        assert not np.any(matcore.pairwise_row_distances(np.ones((3, 2))))

    def test_345(self):
        assert matcore.pairwise_row_distances([[0.0, 0.0], [3.0, 4.0]])[0, 1] == 5.0

    def test_symmetric_zero_diagonal(self):
        D = matcore.pairwise_row_distances(seeded(1, (4, 3)))
        assert np.array_equal(D, D.T) and not np.any(np.diag(D))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_triangle_inequality(self, seed):
        D = matcore.pairwise_row_distances(seeded(seed, (6, 4)))
        for a in range(6):
            for b in range(6):
                for c in range(6):
                    assert D[a, c] <= D[a, b] + D[b, c] + 1e-12

    def test_single_row(self):
        with pytest.raises(BadShape):
            matcore.pairwise_row_distances([[1.0, 2.0]])


class TestTopSingular:
    def test_diagonal(self):
        s, u, v = matcore.top_singular_triplet(np.diag([2.0, 1.0]))
        assert s == pytest.approx(2.0, abs=1e-10)
        assert np.allclose(u, [1, 0], atol=1e-8) and np.allclose(v, [1, 0], atol=1e-8)

    def test_rank_one_closed_form(self):
        M = np.outer([1.0, 2.0], [3.0, 4.0])
        s, _, _ = matcore.top_singular_triplet(M)
        assert s == pytest.approx(oracles.closed_form_2x2_sigma_max(M.tolist()), abs=1e-10)
        assert s == pytest.approx(5 * math.sqrt(5), abs=1e-10)

    def test_seeded_5x4_against_jacobi(self):
        M = seeded(5, (5, 4))
        s, _, _ = matcore.top_singular_triplet(M)
        assert abs(s - oracles.singular_values(M.tolist())[0]) < 1e-8

    def test_singular_equations(self):
        M = seeded(6, (6, 3))
        s, u, v = matcore.top_singular_triplet(M)
        assert np.linalg.norm(M @ v - s * u) < 1e-8
        assert np.linalg.norm(M.T @ u - s * v) < 1e-8

    def test_sign_convention(self):
        for seed in range(20):
            _, u, _ = matcore.top_singular_triplet(seeded(seed, (5, 5)))
            assert u.sum() >= 0

    def test_zero_matrix(self):
        with pytest.raises(ZeroMatrix):
            matcore.top_singular_triplet(np.zeros((3, 3)))

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            matcore.top_singular_triplet(np.eye(2), tol=0.0)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 8))
    @settings(max_examples=60, deadline=None)
    def test_transpose_invariance(self, seed, n, p):
        M = seeded(seed, (n, p))
        a = matcore.top_singular_triplet(M).sigma
        b = matcore.top_singular_triplet(M.T).sigma
        assert abs(a - b) < 1e-9 * max(1.0, a)


class TestTopTwo:
    def test_diagonal(self):
        first, second = matcore.top_two_singular(np.diag([3.0, 1.0]))
        assert first.sigma == pytest.approx(3.0, abs=1e-10)
        assert second.sigma == pytest.approx(1.0, abs=1e-10)

    def test_rank_two_deflation_matches_jacobi(self):
        rng = np.random.default_rng(9)
        M = np.outer(rng.standard_normal(4), rng.standard_normal(4)) * 3 + np.outer(
            rng.standard_normal(4), rng.standard_normal(4))
        expected = oracles.singular_values(M.tolist())
        first, second = matcore.top_two_singular(M)
        assert abs(first.sigma - expected[0]) < 1e-8
        assert abs(second.sigma - expected[1]) < 1e-8

    def test_rank_one(self):
        with pytest.raises(RankDeficient):
            matcore.top_two_singular(np.outer([1.0, 2.0, 3.0], [1.0, 1.0]))


class TestEigenpair:
    def test_diagonal(self):
        lam, v = matcore.top_eigenpair_sym(np.diag([3.0, 1.0]))
        assert lam == pytest.approx(3.0, abs=1e-10)
        assert np.allclose(v, [1, 0], atol=1e-8)

    def test_zero_matrix_warns(self):
        with pytest.warns(ZeroSpectrum):
            lam, v = matcore.top_eigenpair_sym(np.zeros((3, 3)))
        assert lam == 0.0 and np.linalg.norm(v) == 1.0

    def test_collinear_points(self):
        # hand double-centring of points 0, 1, 2 on a line
        B = np.array([[1.0, 0.0, -1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 1.0]])
        lam, v = matcore.top_eigenpair_sym(B)
        assert lam == pytest.approx(2.0, abs=1e-10)
        assert abs(abs(v[0]) - 1 / math.sqrt(2)) < 1e-8 and abs(v[1]) < 1e-8
        assert v[0] == pytest.approx(-v[2], abs=1e-10)

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            matcore.top_eigenpair_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_gram_against_jacobi(self):
        M = seeded(3, (7, 5))
        lam, v = matcore.top_eigenpair_sym(M.T @ M)
        assert abs(lam - oracles.jacobi_eigenvalues(oracles.gram(M.tolist()))[0]) < 1e-8 * max(1, lam)
