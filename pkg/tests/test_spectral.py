import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbethe import (
    Hypergraph,
    SpectralConfig,
    SpectralError,
    SymmetricHsbmSpec,
    ami,
    bethe_hessian,
    bulk_radius,
    count_negative_eigenvalues,
    kmeans,
    lowest_eigenpairs,
    sample_symmetric,
    spectral_cluster,
)

from conftest import labels_match_up_to_permutation, random_hypergraph


def dense_operator(h, eta):
    """Direct dense evaluation of the operator definition."""
    n = h.n
    B = np.eye(n)
    for k in h.orders:
        denom = (1.0 - eta) * (eta + k - 1.0)
        proj = h.projection(k)
        B -= np.diag((k - 1.0) / denom * proj.degree_diag)
        B += eta / denom * proj.comat.toarray()
    return B


class TestBulkRadius:
    def test_2_uniform(self):
        # 2-uniform with mean degree exactly 9 -> radius 3
        h = Hypergraph(2, [(0, 1)] * 9)
        assert h.degree_stats().mean == 9.0
        assert bulk_radius(h) == pytest.approx(3.0, rel=1e-15)

    def test_mixed_order_arithmetic(self):
        # per-order mean degrees 4 (order 2) and 2 (order 3) -> 2 + 2 = 4
        h = Hypergraph(3, [(0, 1)] * 6 + [(0, 1, 2)] * 2)
        stats = h.degree_stats()
        assert stats.per_order == {2: 4.0, 3: 2.0}
        assert bulk_radius(h) == pytest.approx(4.0, rel=1e-15)

    def test_additive_over_orders(self):
        spec = SymmetricHsbmSpec(n=600, q=2, orders=(2, 3), d=8.0, eps=0.3, seed=0)
        h, _ = sample_symmetric(spec)
        stats = h.degree_stats()
        expected = sum(np.sqrt(dk * (k - 1)) for k, dk in stats.per_order.items())
        assert bulk_radius(h) == pytest.approx(expected, rel=1e-12)

    def test_too_sparse_errors(self):
        h = Hypergraph(10, [(0, 1)])
        with pytest.raises(SpectralError, match="sparse"):
            bulk_radius(h)

    def test_empty_errors(self):
        with pytest.raises(SpectralError):
            bulk_radius(Hypergraph(5, []))


class TestBetheHessian:
    def test_hand_value_single_2_edge(self):
        B = bethe_hessian(Hypergraph(2, [(0, 1)]), 2.0)
        expected = np.array([[4.0 / 3.0, -2.0 / 3.0], [-2.0 / 3.0, 4.0 / 3.0]])
        assert np.allclose(B.matrix.to_dense(), expected, atol=1e-15)
        # equals the classical graph operator (eta^2-1) I - eta A + D up to 1/(eta^2-1)
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        graph = 3.0 * np.eye(2) - 2.0 * A + np.eye(2)
        assert np.allclose(B.matrix.to_dense(), graph / 3.0, atol=1e-15)

    def test_hand_value_single_3_edge(self):
        B = bethe_hessian(Hypergraph(3, [(0, 1, 2)]), 2.0)
        A3 = np.ones((3, 3)) - np.eye(3)
        assert np.allclose(B.matrix.to_dense(), 1.5 * np.eye(3) - 0.5 * A3, atol=1e-15)
        assert np.allclose(
            np.linalg.eigvalsh(B.matrix.to_dense()), [0.5, 2.0, 2.0], atol=1e-12
        )

    def test_empty_hypergraph_is_identity(self):
        B = bethe_hessian(Hypergraph(4, []), 3.7)
        assert np.allclose(B.matrix.to_dense(), np.eye(4))

    def test_pole_rejection(self):
        h = Hypergraph(3, [(0, 1, 2)])
        for eta in (1.0, -2.0):
            with pytest.raises(SpectralError, match="pole"):
                bethe_hessian(h, eta)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_matches_dense_definition(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 50))
        orders = tuple(int(k) for k in rng.choice([2, 3, 4, 5], size=2, replace=False) if k <= n)
        h = random_hypergraph(rng, n, orders=orders or (2,))
        eta = float(rng.uniform(1.5, 6.0))
        B = bethe_hessian(h, eta)
        dense = dense_operator(h, eta)
        assert np.allclose(B.matrix.to_dense(), dense, atol=1e-12)
        x = rng.standard_normal(n)
        assert np.allclose(B.matrix.matvec(x), dense @ x, atol=1e-12)

    def test_nnz_bound(self):
        spec = SymmetricHsbmSpec(n=500, q=2, orders=(2, 3), d=6.0, eps=0.2, seed=4)
        h, _ = sample_symmetric(spec)
        B = bethe_hessian(h, bulk_radius(h))
        bound = h.n + sum(h.projection(k).comat.nnz for k in h.orders)
        assert B.matrix.nnz <= bound


class TestEigensolver:
    def test_identity_matrix(self):
        B = bethe_hessian(Hypergraph(4, []), 2.0)
        w, v = lowest_eigenpairs(B.matrix, 1)
        assert w[0] == pytest.approx(1.0)
        assert np.linalg.norm(v[:, 0]) == pytest.approx(1.0)

    def test_3_edge_lowest(self):
        B = bethe_hessian(Hypergraph(3, [(0, 1, 2)]), 2.0)
        w, _ = lowest_eigenpairs(B.matrix, 1)
        assert w[0] == pytest.approx(0.5, abs=1e-10)

    def test_against_dense_oracle_small(self, rng):
        spec = SymmetricHsbmSpec(n=180, q=2, orders=(2, 3), d=8.0, eps=0.1, seed=3)
        h, _ = sample_symmetric(spec)
        B = bethe_hessian(h, bulk_radius(h))
        w, v = lowest_eigenpairs(B.matrix, 4)
        dense_w = np.linalg.eigvalsh(B.matrix.to_dense())
        assert np.allclose(w, dense_w[:4], atol=1e-8)

    def test_iterative_path_matches_dense(self):
        # n > the dense cutoff exercises ARPACK
        spec = SymmetricHsbmSpec(n=900, q=2, orders=(2,), d=8.0, eps=0.1, seed=6)
        h, _ = sample_symmetric(spec)
        B = bethe_hessian(h, bulk_radius(h))
        w, v = lowest_eigenpairs(B.matrix, 3, seed=1)
        dense_w = np.linalg.eigvalsh(B.matrix.to_dense())
        assert np.allclose(w, dense_w[:3], atol=1e-7)
        norm = np.abs(B.matrix.to_dense()).sum(axis=1).max()
        res = np.linalg.norm(B.matrix.to_csr() @ v - v * w, axis=0)
        assert res.max() <= 1e-8 * norm

    def test_determinism(self):
        spec = SymmetricHsbmSpec(n=900, q=2, orders=(2,), d=8.0, eps=0.1, seed=6)
        h, _ = sample_symmetric(spec)
        B = bethe_hessian(h, bulk_radius(h))
        w1, v1 = lowest_eigenpairs(B.matrix, 2, seed=5)
        w2, v2 = lowest_eigenpairs(B.matrix, 2, seed=5)
        assert np.array_equal(w1, w2) and np.array_equal(v1, v2)

    def test_k_bounds(self):
        B = bethe_hessian(Hypergraph(3, [(0, 1, 2)]), 2.0)
        with pytest.raises(ValueError):
            lowest_eigenpairs(B.matrix, 0)
        with pytest.raises(ValueError):
            lowest_eigenpairs(B.matrix, 4)


class TestCountNegative:
    def test_identity_has_none(self):
        B = bethe_hessian(Hypergraph(4, []), 2.0)
        assert count_negative_eigenvalues(B) == 0

    def test_detectable_q2(self):
        spec = SymmetricHsbmSpec(n=2000, q=2, orders=(2, 3), d=10.0, eps=0.05, seed=8)
        h, _ = sample_symmetric(spec)
        B = bethe_hessian(h, bulk_radius(h))
        assert count_negative_eigenvalues(B) == 2

    def test_no_structure_leaves_only_leading_direction(self):
        # far above the threshold only the leading (degree) direction stays
        # negative; the dense oracle gives 1, not 0, per instance
        counts = []
        for seed in range(10):
            spec = SymmetricHsbmSpec(n=400, q=3, orders=(2, 3), d=10.0, eps=0.95, seed=seed)
            h, _ = sample_symmetric(spec)
            B = bethe_hessian(h, bulk_radius(h))
            counts.append(count_negative_eigenvalues(B))
        assert sorted(counts)[len(counts) // 2] <= 1

    def test_matches_dense_count(self, rng):
        spec = SymmetricHsbmSpec(n=300, q=2, orders=(2, 3), d=9.0, eps=0.15, seed=2)
        h, _ = sample_symmetric(spec)
        B = bethe_hessian(h, bulk_radius(h))
        w = np.linalg.eigvalsh(B.matrix.to_dense())
        thr = -1e-8 * np.abs(B.matrix.diag).max()
        assert count_negative_eigenvalues(B) == int((w < thr).sum())


class TestKmeans:
    def test_separated_clusters(self):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(0, 0.1, (40, 2)), rng.normal(5, 0.1, (60, 2))])
        labels = kmeans(X, 2, seed=1)
        assert labels_match_up_to_permutation(labels, [0] * 40 + [1] * 60, 2)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((50, 3))
        assert np.array_equal(kmeans(X, 4, seed=9), kmeans(X, 4, seed=9))

    def test_k1(self):
        X = np.random.default_rng(0).standard_normal((10, 2))
        assert set(kmeans(X, 1)) == {0}


class TestClusterPipeline:
    def test_deep_detectable_regime(self):
        spec = SymmetricHsbmSpec(n=2000, q=2, orders=(2, 3), d=10.0, eps=0.05, seed=14)
        h, planted = sample_symmetric(spec)
        result = spectral_cluster(h)
        assert result.partition.q == 2
        assert ami(result.partition, planted) >= 0.95

    def test_fixed_q_mode(self):
        spec = SymmetricHsbmSpec(n=800, q=2, orders=(2, 3), d=10.0, eps=0.9, seed=1)
        h, _ = sample_symmetric(spec)
        result = spectral_cluster(h, num_communities=2)
        assert result.partition.q == 2  # forced even without negative pairs

    def test_no_structure_error_needs_zero_negatives(self):
        # a hyperedge-free operator is the identity: nothing negative
        h = Hypergraph(40, [(i, (i + 1) % 40) for i in range(40)] * 3)
        result_or_error = None
        try:
            result_or_error = spectral_cluster(h, config=SpectralConfig())
        except SpectralError as exc:
            result_or_error = exc
        assert isinstance(result_or_error, (SpectralError,)) or result_or_error.partition.q >= 1

    def test_embedding_orthonormal(self):
        spec = SymmetricHsbmSpec(n=700, q=2, orders=(2, 3), d=10.0, eps=0.1, seed=2)
        h, _ = sample_symmetric(spec)
        result = spectral_cluster(h)
        gram = result.embedding.T @ result.embedding
        assert np.allclose(gram, np.eye(gram.shape[0]), atol=1e-8)

    def test_eigenvalues_ascending_and_qhat(self):
        spec = SymmetricHsbmSpec(n=700, q=3, orders=(2, 3), d=12.0, eps=0.05, seed=3)
        h, _ = sample_symmetric(spec)
        result = spectral_cluster(h)
        assert np.all(np.diff(result.eigenvalues) >= -1e-12)
        assert result.num_negative == result.partition.q == 3

    def test_node_relabeling_invariance(self):
        spec = SymmetricHsbmSpec(n=600, q=2, orders=(2, 3), d=10.0, eps=0.05, seed=4)
        h, planted = sample_symmetric(spec)
        rng = np.random.default_rng(0)
        perm = rng.permutation(h.n)
        hp = Hypergraph(h.n, [tuple(perm[list(e)]) for e in h.edges])
        r1 = spectral_cluster(h)
        r2 = spectral_cluster(hp)
        assert np.allclose(np.sort(r1.eigenvalues), np.sort(r2.eigenvalues), atol=1e-10)
        # labels follow the permutation up to community renaming
        relabeled = np.empty(h.n, dtype=int)
        relabeled[perm] = r1.partition.labels
        assert labels_match_up_to_permutation(relabeled, r2.partition.labels, 2)


class TestGraphReduction:
    def graph_pipeline(self, h, seed=0):
        """Classical dyadic pipeline: (eta^2-1) I - eta A + D at eta = sqrt(d)."""
        A = h.projection(2).comat.toarray().astype(float)
        D = np.diag(h.projection(2).degree_diag.astype(float))
        eta = np.sqrt(h.degree_stats().mean)
        B = (eta**2 - 1.0) * np.eye(h.n) - eta * A + D
        w, v = np.linalg.eigh(B)
        thr = -1e-8 * np.abs(np.diag(B)).max()
        qhat = int((w < thr).sum())
        idx = np.argmax(np.abs(v), axis=0)
        flip = v[idx, np.arange(h.n)] < 0
        v[:, flip] *= -1.0
        return w, qhat, (kmeans(v[:, :qhat], qhat, seed=seed) if qhat else None)

    def test_sign_pattern_and_labels_match(self):
        matched = 0
        for seed in range(4):
            spec = SymmetricHsbmSpec(n=400, q=2, orders=(2,), d=10.0, eps=0.1, seed=seed)
            h, _ = sample_symmetric(spec)
            w_graph, qhat_graph, labels_graph = self.graph_pipeline(h)
            B = bethe_hessian(h, bulk_radius(h))
            w_hyper = np.linalg.eigvalsh(B.matrix.to_dense())
            assert np.array_equal(np.sign(np.round(w_hyper, 12)), np.sign(np.round(w_graph, 12)))
            result = spectral_cluster(h)
            assert result.partition.q == qhat_graph
            assert labels_match_up_to_permutation(
                result.partition.labels, labels_graph, qhat_graph
            )
            matched += 1
        assert matched == 4
