import numpy as np
import pytest
import scipy.sparse as sp

from mvamg.exceptions import CoarseningStagnationError
from mvamg.matching import Matching, build_edge_weights, greedy_max_product_matching
from mvamg.pairwise import (
    CoarseningParams,
    build_pair_prolongators,
    build_pairwise_hierarchy,
    compatible_relaxation_quality,
    compose_pairwise_steps,
)
from mvamg.sparse import as_csr

from conftest import laplacian_1d, random_spd_csr


def matching_for(A, w):
    return greedy_max_product_matching(build_edge_weights(A, w))


def single_pair():
    return Matching(pairs=np.array([[0, 1]]), unmatched=np.empty(0, dtype=np.int64))


class TestPairProlongators:
    def test_hand_example(self):
        A = as_csr(np.diag([2.0, 2.0]))
        pp = build_pair_prolongators(A, np.ones(2), single_pair())
        s = 1.0 / np.sqrt(2.0)
        assert np.allclose(pp.P_c.toarray(), [[s], [s]], atol=1e-15)
        assert np.allclose(pp.P_f.toarray(), [[-0.5], [0.5]], atol=1e-15)
        # D-orthogonality of the two columns
        D = np.diag([2.0, 2.0])
        assert abs(pp.P_c.toarray()[:, 0] @ D @ pp.P_f.toarray()[:, 0]) < 1e-15

    def test_singleton_sign(self):
        A = as_csr(np.array([[3.0]]))
        m = Matching(pairs=np.empty((0, 2), dtype=np.int64), unmatched=np.array([0]))
        pp = build_pair_prolongators(A, np.array([-3.0]), m)
        assert pp.P_c.toarray().tolist() == [[-1.0]]

    def test_constant_vector_pairs(self):
        A = as_csr(np.diag([4.0, 4.0, 4.0, 4.0]))
        m = Matching(pairs=np.array([[0, 1], [2, 3]]), unmatched=np.empty(0, dtype=np.int64))
        pp = build_pair_prolongators(A, np.ones(4), m)
        s = 1.0 / np.sqrt(2.0)
        assert np.allclose(pp.P_c.toarray()[:, 0], [s, s, 0, 0])
        assert np.allclose(pp.P_c.toarray()[:, 1], [0, 0, s, s])

    @pytest.mark.parametrize("seed", range(15))
    def test_d_orthogonality_and_unit_columns(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 30))
        A = random_spd_csr(n, density=0.4, seed=seed)
        w = rng.uniform(-2.0, 2.0, n)
        w[w == 0.0] = 1.0
        pp = build_pair_prolongators(A, w, matching_for(A, w))
        D = sp.diags(A.diagonal())
        cross = (pp.P_c.T @ D @ pp.P_f)
        if cross.nnz:
            assert np.max(np.abs(cross.data)) <= 1e-12
        norms = np.sqrt(np.asarray(pp.P_c.power(2).sum(axis=0)).ravel())
        assert np.allclose(norms, 1.0, atol=1e-13)

    @pytest.mark.parametrize("seed", range(10))
    def test_smooth_vector_in_range(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 30))
        A = random_spd_csr(n, density=0.4, seed=seed + 50)
        w = rng.uniform(0.1, 2.0, n)
        pp = build_pair_prolongators(A, w, matching_for(A, w))
        # coarse representation: sqrt(w_i^2+w_j^2) per pair, |w_k| per singleton
        c = np.empty(pp.P_c.shape[1])
        for col, (i, j) in enumerate(pp.pair_order):
            c[col] = np.sqrt(w[i] ** 2 + w[j] ** 2) if j >= 0 else abs(w[i])
        assert np.max(np.abs(pp.P_c @ c - w)) <= 1e-12
        # equivalently w = P_c P_c' w since the columns are orthonormal
        assert np.max(np.abs(pp.P_c @ (pp.P_c.T @ w) - w)) <= 1e-12

    def test_zero_entry_at_singleton_perturbed(self):
        A = as_csr(np.diag([1.0, 1.0, 1.0]))
        m = Matching(pairs=np.array([[0, 1]]), unmatched=np.array([2]))
        pp = build_pair_prolongators(A, np.array([1.0, 1.0, 0.0]), m)
        assert pp.perturbed.tolist() == [2]
        assert pp.P_c[2, 1] == 1.0

    def test_identically_zero_vector_rejected(self):
        A = as_csr(np.diag([1.0, 1.0]))
        m = Matching(pairs=np.empty((0, 2), dtype=np.int64), unmatched=np.array([0, 1]))
        with pytest.raises(ValueError, match="zero"):
            build_pair_prolongators(A, np.zeros(2), m)


class TestComposeSteps:
    def test_one_step_on_path(self):
        res = compose_pairwise_steps(laplacian_1d(4), np.ones(4), steps=1)
        assert not res.stagnated
        assert sorted(len(a) for a in res.aggregates) == [2, 2]
        assert res.A_c.shape == (2, 2)

    def test_two_steps_size_bound(self):
        res = compose_pairwise_steps(laplacian_1d(16), np.ones(16), steps=2)
        assert all(len(a) <= 4 for a in res.aggregates)

    def test_aggregates_partition(self):
        A = random_spd_csr(23, density=0.3, seed=9)
        res = compose_pairwise_steps(A, np.ones(23), steps=2)
        merged = np.sort(np.concatenate(res.aggregates))
        assert np.array_equal(merged, np.arange(23))

    @pytest.mark.parametrize("steps", [1, 2, 3])
    def test_unit_column_norms(self, steps):
        A = random_spd_csr(32, density=0.2, seed=steps)
        res = compose_pairwise_steps(A, np.ones(32), steps=steps)
        norms = np.sqrt(np.asarray(res.P.power(2).sum(axis=0)).ravel())
        assert np.allclose(norms, 1.0, atol=1e-13)

    def test_diagonal_matrix_stagnates(self):
        res = compose_pairwise_steps(as_csr(np.diag([1.0, 2.0, 3.0])), np.ones(3), steps=2)
        assert res.stagnated
        assert res.steps_done == 0
        assert res.A_c.shape == (3, 3)

    def test_restricted_vector_is_p_transpose_w(self):
        A = laplacian_1d(8)
        w = np.linspace(1.0, 2.0, 8)
        res = compose_pairwise_steps(A, w, steps=2)
        assert np.allclose(res.w_c, res.P.T @ w, atol=1e-14)


class TestHierarchy:
    def test_path_level_sizes(self):
        params = CoarseningParams(min_coarse_size=4)
        h = build_pairwise_hierarchy(laplacian_1d(64), np.ones(64), params)
        assert h.sizes() == [64, 16, 4]

    def test_small_input_single_level(self):
        h = build_pairwise_hierarchy(laplacian_1d(8), np.ones(8))
        assert h.nl == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_levels_symmetric_positive_diagonal(self, seed):
        A = random_spd_csr(300, density=0.05, seed=seed)
        h = build_pairwise_hierarchy(A, np.ones(300), CoarseningParams(min_coarse_size=10))
        assert h.nl > 1
        for lvl in h.levels:
            assert (lvl.A != lvl.A.T).nnz == 0
            assert np.all(lvl.A.diagonal() > 0)
            np.linalg.cholesky(lvl.A.toarray())

    def test_finest_stagnation_raises(self):
        A = as_csr(np.diag(np.arange(1.0, 60.0)))
        with pytest.raises(CoarseningStagnationError) as err:
            build_pairwise_hierarchy(A, np.ones(59))
        assert err.value.level == 0

    def test_aggregates_partition_each_level(self, ani1_32):
        h = build_pairwise_hierarchy(ani1_32, np.ones(ani1_32.shape[0]),
                                     CoarseningParams(min_coarse_size=10))
        for k in range(1, h.nl):
            fine_n = h.levels[k - 1].A.shape[0]
            merged = np.sort(np.concatenate(h.levels[k].aggregates))
            assert np.array_equal(merged, np.arange(fine_n))


class TestCompatibleRelaxation:
    def test_diagonal_matrix(self):
        A = as_csr(np.diag([1.0, 2.0, 3.0]))
        m = Matching(pairs=np.empty((0, 2), dtype=np.int64), unmatched=np.arange(3))
        pp = build_pair_prolongators(A, np.ones(3), m)
        assert compatible_relaxation_quality(A, pp, sweeps=5) == 0.0

    def test_path_matches_dense_spectral_radius(self):
        A = laplacian_1d(4)
        m = Matching(pairs=np.array([[0, 1], [2, 3]]), unmatched=np.empty(0, dtype=np.int64))
        pp = build_pair_prolongators(A, np.ones(4), m)
        got = compatible_relaxation_quality(A, pp, sweeps=30, seed=3)
        Af = pp.P_f.T @ A @ pp.P_f
        M = np.eye(2) - np.diag(1.0 / Af.diagonal()) @ Af.toarray()
        expected = np.max(np.abs(np.linalg.eigvals(M)))
        assert got == pytest.approx(expected, abs=0.05)

    def test_deterministic(self, ani1_32):
        A = ani1_32
        w = np.ones(A.shape[0])
        pp = build_pair_prolongators(A, w, matching_for(A, w))
        a = compatible_relaxation_quality(A, pp, sweeps=10, seed=7)
        b = compatible_relaxation_quality(A, pp, sweeps=10, seed=7)
        assert a == b
