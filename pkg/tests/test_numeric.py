import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bow, six_vertex, graph, mixed_graphs, random_graph
from trekid.errors import (
    InstanceTooLargeError,
    NumericFailure,
    SingularSystemError,
    UnsupportedCertificatePhaseError,
)
from trekid.graph import ancestors, induced_subgraph, mixed_components
from trekid.identify import ancestral_identifiable, htc_identifiable
from trekid.numeric import (
    Parameters,
    covariance,
    enumerate_treks,
    jacobian,
    jacobian_fd_error,
    jacobian_rank,
    numeric_jacobian,
    parameter_index,
    params_to_vector,
    recover_parameters,
    sample_parameters,
    trek_rule_covariance,
    vector_to_params,
)


def chain2(lam=2.0):
    Lambda = np.array([[0.0, lam], [0.0, 0.0]])
    return graph(2, [(1, 2)]), Parameters(Lambda, np.eye(2))


def inverse_oracle(params):
    IL = np.eye(params.Lambda.shape[0]) - params.Lambda
    K = np.linalg.inv(IL)
    return K.T @ params.Omega @ K


class TestSampling:
    def test_bow_support(self):
        p = sample_parameters(bow(), np.random.default_rng(1))
        assert p.Lambda[0, 1] != 0 and p.Omega[0, 1] != 0
        d = np.abs(np.diag(p.Omega))
        assert np.all(d > np.abs(p.Omega).sum(axis=1) - d)

    def test_no_bidirected_gives_diagonal_omega(self):
        p = sample_parameters(graph(3, [(1, 2), (2, 3)]), np.random.default_rng(1))
        assert np.count_nonzero(p.Omega - np.diag(np.diag(p.Omega))) == 0

    def test_deterministic(self):
        a = sample_parameters(six_vertex(), np.random.default_rng(5))
        b = sample_parameters(six_vertex(), np.random.default_rng(5))
        assert np.array_equal(a.Lambda, b.Lambda) and np.array_equal(a.Omega, b.Omega)

    @settings(max_examples=60, deadline=None)
    @given(mixed_graphs(max_n=7), st.integers(0, 2**32 - 1))
    def test_ranges_and_support(self, G, seed):
        p = sample_parameters(G, np.random.default_rng(seed))
        p.check(G)
        for u, w in G.directed:
            assert 0.5 <= abs(p.Lambda[u - 1, w - 1]) <= 1.5
        for u, w in G.bidirected:
            assert 0.2 <= abs(p.Omega[u - 1, w - 1]) <= 0.8
        off = np.abs(p.Omega).sum(axis=1) - np.diag(p.Omega)
        margin = np.diag(p.Omega) - off
        assert np.all((margin >= 1.0) & (margin <= 2.0))

    def test_check_rejects_off_support(self):
        G = graph(2)
        with pytest.raises(ValueError):
            Parameters(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2)).check(G)
        with pytest.raises(ValueError):
            Parameters(np.zeros((2, 2)), np.array([[1.0, 0.3], [0.3, 1.0]])).check(G)


class TestCovariance:
    def test_chain(self):
        _, p = chain2()
        assert np.allclose(covariance(p), [[1, 2], [2, 5]], rtol=0, atol=1e-14)

    def test_zero_lambda(self):
        p = sample_parameters(graph(3, [], [(1, 2), (2, 3)]), np.random.default_rng(0))
        assert np.array_equal(covariance(p), p.Omega)

    @settings(max_examples=100, deadline=None)
    @given(mixed_graphs(max_n=8), st.integers(0, 2**32 - 1))
    def test_matches_inverse_and_is_pd(self, G, seed):
        p = sample_parameters(G, np.random.default_rng(seed))
        S = covariance(p)
        assert np.array_equal(S, S.T)
        assert np.allclose(S, inverse_oracle(p), rtol=1e-10, atol=1e-10)
        assert np.all(np.linalg.eigvalsh(S) > 0)

    def test_not_pd_raises(self):
        p = Parameters(np.zeros((2, 2)), np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(NumericFailure):
            covariance(p)

    def test_six_vertex_trek_rule(self):
        G = six_vertex()
        p = sample_parameters(G, np.random.default_rng(11))
        assert np.max(np.abs(trek_rule_covariance(G, p) - covariance(p))) < 1e-9


class TestTreks:
    def test_chain_one_to_three(self):
        G = graph(3, [(1, 2), (2, 3)])
        treks = enumerate_treks(G, 1, 3)
        assert [str(t) for t in treks] == ["1->2->3"]

    def test_chain_three_to_three(self):
        G = graph(3, [(1, 2), (2, 3)])
        treks = enumerate_treks(G, 3, 3)
        assert len(treks) == 3
        assert sorted(len(t.left) for t in treks) == [1, 2, 3]

    def test_disconnected(self):
        assert enumerate_treks(graph(2), 1, 2) == []

    def test_bridge(self):
        G = graph(2, [], [(1, 2)])
        p = sample_parameters(G, np.random.default_rng(0))
        assert trek_rule_covariance(G, p)[0, 1] == p.Omega[0, 1]
        assert len(enumerate_treks(G, 1, 2)) == 1

    def test_chain_trek_rule(self):
        G, p = chain2()
        assert np.allclose(trek_rule_covariance(G, p), [[1, 2], [2, 5]])

    def test_size_limit(self):
        with pytest.raises(InstanceTooLargeError):
            enumerate_treks(graph(11), 1, 2)

    @settings(max_examples=100, deadline=None)
    @given(mixed_graphs(max_n=6), st.integers(0, 2**32 - 1))
    def test_trek_rule_matches_matrix(self, G, seed):
        p = sample_parameters(G, np.random.default_rng(seed))
        assert np.max(np.abs(trek_rule_covariance(G, p) - covariance(p))) < 1e-9

    @settings(max_examples=60, deadline=None)
    @given(mixed_graphs(max_n=5))
    def test_treks_have_no_collider(self, G):
        for v in G.vertices:
            for w in G.vertices:
                for t in enumerate_treks(G, v, w):
                    assert t.source == v and t.target == w
                    # both sides are directed paths read away from the top
                    assert all((a, b) in G.directed for a, b in zip(t.left, t.left[1:]))
                    assert all((a, b) in G.directed for a, b in zip(t.right, t.right[1:]))
                    if t.bridge:
                        a, b = t.left[0], t.right[0]
                        assert (min(a, b), max(a, b)) in G.bidirected
                    else:
                        assert t.left[0] == t.right[0]


class TestAncestralSubmatrix:
    @settings(max_examples=80, deadline=None)
    @given(mixed_graphs(max_n=8), st.data())
    def test_submatrix(self, G, data):
        seed = data.draw(st.integers(0, 2**32 - 1))
        Vp = ancestors(G, data.draw(st.sets(st.integers(1, G.n), min_size=1)))
        p = sample_parameters(G, np.random.default_rng(seed))
        sub = induced_subgraph(G, Vp)
        idx = [v - 1 for v in sub.original_labels]
        sub_params = Parameters(p.Lambda[np.ix_(idx, idx)], p.Omega[np.ix_(idx, idx)])
        assert np.max(np.abs(covariance(sub_params) - covariance(p)[np.ix_(idx, idx)])) <= 1e-12


class TestRecovery:
    def test_chain(self):
        G, p = chain2()
        cert = htc_identifiable(G).certificate
        rec = recover_parameters(G, np.array([[1.0, 2.0], [2.0, 5.0]]), cert)
        assert np.allclose(rec.Lambda, p.Lambda) and np.allclose(rec.Omega, np.eye(2))

    def test_components_right_component(self):
        comp = mixed_components(graph(5, [(1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5)],
                                      [(1, 4), (2, 3), (2, 5)]))[1]
        G = comp.graph
        cert = htc_identifiable(G).certificate
        rng = np.random.default_rng(2)
        for _ in range(5):
            p = sample_parameters(G, rng)
            rec = recover_parameters(G, covariance(p), cert)
            rel = max(np.max(np.abs(rec.Lambda - p.Lambda)), np.max(np.abs(rec.Omega - p.Omega))) / np.max(np.abs(p.Omega))
            assert rel < 1e-6

    @settings(max_examples=60, deadline=None)
    @given(mixed_graphs(max_n=8), st.integers(0, 2**32 - 1))
    def test_dags_exact(self, G, seed):
        D = graph(G.n, G.directed)
        p = sample_parameters(D, np.random.default_rng(seed))
        rec = recover_parameters(D, covariance(p), htc_identifiable(D).certificate)
        assert np.max(np.abs(rec.Lambda - p.Lambda)) < 1e-8
        assert np.max(np.abs(rec.Omega - p.Omega)) < 1e-8

    def test_unsupported_component_step(self):
        G = six_vertex()
        p = sample_parameters(G, np.random.default_rng(0))
        with pytest.raises(UnsupportedCertificatePhaseError):
            recover_parameters(G, covariance(p), ancestral_identifiable(G).certificate)

    def test_singular(self):
        G, p = chain2()
        cert = htc_identifiable(G).certificate
        with pytest.raises(SingularSystemError):
            recover_parameters(G, np.array([[0.0, 0.0], [0.0, 1.0]]), cert)

    def test_incomplete_certificate(self):
        G = bow()
        cert = htc_identifiable(G).certificate
        with pytest.raises(ValueError):
            recover_parameters(G, np.eye(2), cert)


class TestJacobian:
    def test_bow_deficient(self):
        r = jacobian_rank(bow(), sample_parameters(bow(), np.random.default_rng(0)))
        assert (r.n_params, r.target_dim) == (4, 3) and r.rank <= 3 and not r.full

    def test_chain_full(self):
        G, p = chain2()
        r = jacobian_rank(G, p)
        assert r.n_params == 3 and r.rank == 3 and r.full

    def test_six_vertex_full(self):
        G = six_vertex()
        r = jacobian_rank(G, sample_parameters(G, np.random.default_rng(4)))
        assert r.n_params == 20 and r.rank == 20

    def test_parameter_vector_round_trip(self):
        G = six_vertex()
        p = sample_parameters(G, np.random.default_rng(4))
        q = vector_to_params(G, params_to_vector(G, p))
        assert np.array_equal(p.Lambda, q.Lambda) and np.array_equal(p.Omega, q.Omega)
        assert len(parameter_index(G)) == 20

    @settings(max_examples=80, deadline=None)
    @given(mixed_graphs(max_n=8), st.integers(0, 2**32 - 1))
    def test_matches_finite_differences(self, G, seed):
        p = sample_parameters(G, np.random.default_rng(seed))
        assert jacobian(G, p).shape == numeric_jacobian(G, p).shape
        assert jacobian_fd_error(G, p) < 1e-5

    def test_no_parameters(self):
        assert jacobian(graph(0), Parameters(np.zeros((0, 0)), np.zeros((0, 0)))).shape == (0, 0)


def test_random_generator_graphs_round_trip():
    rng = np.random.default_rng(99)
    done = 0
    while done < 20:
        G = random_graph(rng, 6, 0.1, 0.4)
        result = htc_identifiable(G)
        if not result.identified:
            continue
        p = sample_parameters(G, rng)
        rec = recover_parameters(G, covariance(p), result.certificate)
        assert np.max(np.abs(rec.Lambda - p.Lambda)) < 1e-6
        done += 1
