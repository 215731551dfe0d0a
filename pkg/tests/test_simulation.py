import numpy as np
import pytest
from hypothesis import given, strategies as st

from funcmax import (
    DgpConfig,
    DomainError,
    apply_alternative,
    draw_scores,
    equicorrelation_root,
    generate_null,
)
from funcmax.basis import BASIS_SIZE, basis_matrix


class TestBasis:
    def test_orthonormality_by_quadrature(self):
        # midpoint quadrature with 1e4 points
        M = 10**4
        t = (np.arange(M) + 0.5) / M
        phi = basis_matrix(t, BASIS_SIZE)
        gram = phi @ phi.T / M
        assert np.max(np.abs(gram - np.eye(BASIS_SIZE))) <= 1e-6

    def test_first_function_constant(self):
        t = np.linspace(0, 1, 11)
        assert np.all(basis_matrix(t, 1) == 1.0)

    def test_closed_forms(self):
        t = np.array([0.0, 0.3, 1.0])
        phi = basis_matrix(t, 5)
        assert np.allclose(phi[1], np.sqrt(2) * np.cos(np.pi * (2 * t - 1)))
        assert np.allclose(phi[2], np.sqrt(2) * np.sin(np.pi * (2 * t - 1)))
        assert np.allclose(phi[3], np.sqrt(2) * np.cos(2 * np.pi * (2 * t - 1)))
        assert np.allclose(phi[4], np.sqrt(2) * np.sin(2 * np.pi * (2 * t - 1)))


class TestEquicorrelationRoot:
    def test_identity_at_rho_zero(self):
        root = equicorrelation_root(5, 0.0)
        assert root.a == 1.0 and root.b == 0.0

    def test_hand_example(self):
        root = equicorrelation_root(2, 0.5)
        assert root.a == pytest.approx(0.7071068, abs=1e-7)
        assert root.b == pytest.approx(0.2588190, abs=1e-7)
        sq = root.dense() @ root.dense()
        assert sq[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert sq[0, 1] == pytest.approx(0.5, abs=1e-12)

    @given(st.integers(1, 40), st.floats(0.0, 0.99))
    def test_squaring_oracle(self, K, rho):
        root = equicorrelation_root(K, rho)
        target = rho + (1 - rho) * np.eye(K)
        sq = root.dense() @ root.dense()
        assert np.max(np.abs(sq - target)) <= 1e-12

    def test_apply_matches_dense(self):
        rng = np.random.default_rng(41)
        root = equicorrelation_root(6, 0.37)
        v = rng.standard_normal((4, 6, 3))
        direct = np.einsum("kj,ijt->ikt", root.dense(), v)
        assert np.allclose(root.apply(v, axis=1), direct, atol=1e-12)

    def test_invalid_rho(self):
        with pytest.raises(DomainError):
            equicorrelation_root(3, 1.0)


class TestDgpConfig:
    def test_permutation_is_bijection(self):
        cfg = DgpConfig(seed=5)
        assert sorted(cfg.sigma_perm) == list(range(1, BASIS_SIZE + 1))

    def test_permutation_deterministic_in_seed(self):
        assert DgpConfig(seed=5).sigma_perm == DgpConfig(seed=5).sigma_perm
        assert DgpConfig(seed=5).sigma_perm != DgpConfig(seed=6).sigma_perm

    def test_json_round_trip(self):
        cfg = DgpConfig(n=10, K=4, T=12, rho=0.3, noise="chisq1", s=0.5,
                        delta=0.2, seed=99)
        back = DgpConfig.from_json(cfg.to_json())
        assert back == cfg

    def test_with_cell_keeps_permutation(self):
        cfg = DgpConfig(seed=7)
        assert cfg.with_cell(n=5, rho=0.9).sigma_perm == cfg.sigma_perm

    def test_defaults_match_simulation_setup(self):
        cfg = DgpConfig()
        assert (cfg.K, cfg.T, cfg.alpha) == (80, 300, 0.55)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            DgpConfig(rho=1.0)
        with pytest.raises(DomainError):
            DgpConfig(noise="uniform")
        with pytest.raises(DomainError):
            DgpConfig(alpha=0.5)


class TestDrawScores:
    def test_determinism(self):
        cfg = DgpConfig(n=4, K=3, T=5, seed=11)
        assert np.array_equal(draw_scores(cfg, 2), draw_scores(cfg, 2))
        assert not np.array_equal(draw_scores(cfg, 2), draw_scores(cfg, 3))

    @pytest.mark.parametrize("noise", ["gaussian", "chisq1"])
    def test_moments(self, noise):
        cfg = DgpConfig(n=40, K=25, T=2, noise=noise, seed=13)
        g = np.concatenate([draw_scores(cfg, r).ravel() for r in range(20)])
        m = g.size  # 1e6
        se = 1 / np.sqrt(m)
        assert abs(g.mean()) <= 4 * se
        var_se = np.sqrt((np.mean(g**4) - 1) / m)
        assert abs(g.var() - 1.0) <= 4 * var_se

    def test_skewness(self):
        cfg_g = DgpConfig(n=40, K=25, T=2, noise="gaussian", seed=14)
        cfg_c = DgpConfig(n=40, K=25, T=2, noise="chisq1", seed=14)
        g = np.concatenate([draw_scores(cfg_g, r).ravel() for r in range(20)])
        c = np.concatenate([draw_scores(cfg_c, r).ravel() for r in range(20)])
        skew = lambda x: np.mean(((x - x.mean()) / x.std()) ** 3)
        assert abs(skew(g)) <= 0.02
        assert skew(c) == pytest.approx(2 * np.sqrt(2), rel=0.05)


class TestGenerateNull:
    def test_single_term_expansion(self, monkeypatch):
        # with only the first score nonzero every curve is a multiple of
        # the sigma(1)-th basis function
        import funcmax.simulate as sim

        cfg = DgpConfig(n=3, K=2, T=20, rho=0.0, seed=17)

        def only_first(config, run_index):
            gen = np.random.default_rng(0)
            g = np.zeros((config.n, config.K, BASIS_SIZE))
            g[:, :, 0] = gen.standard_normal((config.n, config.K))
            return g

        monkeypatch.setattr(sim, "draw_scores", only_first)
        z = sim.generate_null(cfg, 0)
        t = np.arange(1, 21) / 20
        phi1 = basis_matrix(t, BASIS_SIZE)[cfg.sigma_perm[0] - 1]
        for i in range(3):
            for k in range(2):
                # proportionality via projection (phi1 has zeros on the grid)
                c = z.z[i, k] @ phi1 / (phi1 @ phi1)
                assert np.allclose(z.z[i, k], c * phi1, atol=1e-12)

    def test_determinism(self):
        cfg = DgpConfig(n=4, K=3, T=6, rho=0.4, seed=19)
        assert np.array_equal(generate_null(cfg, 1).z, generate_null(cfg, 1).z)

    def test_variance_profile_matches_closed_form(self):
        # pointwise variance at t = 0.5 under rho = 0
        cfg = DgpConfig(n=50, K=4, T=2, rho=0.0, seed=23)
        reps = np.concatenate(
            [generate_null(cfg, r).z[:, :, 0].ravel() for r in range(50)]
        )  # t = 0.5 is the first grid point when T = 2
        phi_half = basis_matrix(np.array([0.5]), BASIS_SIZE)[:, 0]
        sigma = np.asarray(cfg.sigma_perm) - 1
        j = np.arange(1, BASIS_SIZE + 1.0)
        target = float(np.sum(j ** (-2 * cfg.alpha) * phi_half[sigma] ** 2))
        assert reps.var() == pytest.approx(target, rel=0.05)

    def test_channel_variance_exchangeable(self):
        cfg = DgpConfig(n=60, K=5, T=3, rho=0.6, seed=29)
        z = np.concatenate([generate_null(cfg, r).z for r in range(40)], axis=0)
        per_channel_var = z.var(axis=(0, 2))
        assert np.max(per_channel_var) / np.min(per_channel_var) < 1.15

    def test_cross_channel_independence_at_rho_zero(self):
        cfg = DgpConfig(n=100, K=2, T=2, rho=0.0, seed=31)
        z = np.concatenate([generate_null(cfg, r).z for r in range(100)], axis=0)
        a, b = z[:, 0, 0], z[:, 1, 0]
        m = a.size  # 1e4
        corr = np.corrcoef(a, b)[0, 1]
        assert abs(corr) <= 4 / np.sqrt(m)


class TestApplyAlternative:
    def test_zero_delta_is_identity(self):
        cfg = DgpConfig(n=3, K=4, T=5, s=0.5, delta=0.0, seed=37)
        z = generate_null(cfg, 0)
        assert apply_alternative(z, cfg) is z

    def test_sparse_shift(self):
        cfg = DgpConfig(n=2, K=80, T=4, s=0.1, delta=0.2, seed=41)
        z = generate_null(cfg, 0)
        za = apply_alternative(z, cfg)
        shift = za.z - z.z
        assert np.allclose(shift[:, :8, :], 0.2)
        assert np.all(shift[:, 8:, :] == 0.0)

    def test_full_shift(self):
        cfg = DgpConfig(n=2, K=7, T=3, s=1.0, delta=0.4, seed=43)
        z = generate_null(cfg, 0)
        za = apply_alternative(z, cfg)
        assert np.allclose(za.z - z.z, 0.4)
