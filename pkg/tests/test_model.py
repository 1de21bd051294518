import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psa.errors import DataError, SingularModelError
from psa.family import Composition, enumerate_types, is_refinement
from psa.model import PsaModel, density_log, fit, kappa, log_likelihood, sample, score
from psa.spectral import SpectralSummary, summarize

from conftest import random_orthogonal
from oracles import dense_log_density, gaussian_log_likelihood, random_summary

C = Composition


def make_summary(ell, n=100, p_mean=None):
    ell = np.asarray(ell, dtype=float)
    p = ell.shape[0]
    return SpectralSummary(np.zeros(p) if p_mean is None else p_mean, ell, np.eye(p), n)


def flag_dimension(parts):
    # dim O(p) - sum dim O(gamma_k)
    p = sum(parts)
    return p * (p - 1) // 2 - sum(g * (g - 1) // 2 for g in parts)


class TestKappa:
    def test_full(self):
        assert kappa((1, 1, 1, 1, 1)) == 20

    def test_isotropic(self):
        assert kappa((5,)) == 6

    def test_two_blocks(self):
        assert kappa((2, 3)) == flag_dimension((2, 3)) + 2 + 5 == 13

    @pytest.mark.parametrize("p", range(1, 21))
    def test_boundaries(self, p):
        assert kappa((1,) * p) == p + p * (p + 1) // 2
        assert kappa((p,)) == p + 1

    @pytest.mark.parametrize("p", range(1, 9))
    def test_monotone_under_refinement(self, p):
        types = enumerate_types(p)
        for a in types:
            for b in types:
                if is_refinement(a, b):
                    assert kappa(a) <= kappa(b)


class TestFit:
    def test_block_means(self):
        m = fit(make_summary([4, 2, 1]), (2, 1))
        np.testing.assert_array_equal(m.block_eigenvalues, [3, 1])
        np.testing.assert_array_equal(m.basis, np.eye(3))

    def test_full_type_keeps_eigenvalues(self, rng):
        s = random_summary(rng, 4)
        m = fit(s, (1, 1, 1, 1))
        np.testing.assert_array_equal(m.block_eigenvalues, s.eigenvalues)

    def test_ppca_noise_is_mean_of_discarded(self, rng):
        s = random_summary(rng, 6)
        m = fit(s, Composition.ppca(6, 2))
        assert m.noise_variance == pytest.approx(s.eigenvalues[2:].mean(), rel=1e-15)
        np.testing.assert_array_equal(m.block_eigenvalues[:2], s.eigenvalues[:2])

    def test_singular_block(self):
        with pytest.raises(SingularModelError, match="egulariz"):
            fit(make_summary([1.0, 0.0, 0.0]), (1, 2))

    def test_zero_eigenvalue_inside_positive_block_is_fine(self):
        m = fit(make_summary([1.0, 0.5, 0.0]), (1, 2))
        np.testing.assert_array_equal(m.block_eigenvalues, [1.0, 0.25])

    def test_boundary_degenerate_flag(self):
        assert fit(make_summary([2.0, 2.0, 1.0]), (1, 1, 1)).boundary_degenerate
        assert not fit(make_summary([3.0, 2.0, 1.0]), (1, 1, 1)).boundary_degenerate

    def test_dimension_mismatch(self):
        with pytest.raises(DataError):
            fit(make_summary([3.0, 2.0, 1.0]), (2, 2))

    def test_flag_is_identifiable(self, rng):
        p, gamma = 6, C((2, 3, 1))
        s = random_summary(rng, p)
        base = fit(s, gamma)
        shuffled = s.eigenvectors.copy()
        shuffled[:, 0:2] = shuffled[:, [1, 0]] @ random_orthogonal(rng, 2)
        shuffled[:, 2:5] = shuffled[:, [4, 2, 3]] @ random_orthogonal(rng, 3)
        other = fit(SpectralSummary(s.mean, s.eigenvalues, shuffled, s.n), gamma)
        for k in range(gamma.d):
            np.testing.assert_allclose(other.projector(k), base.projector(k), atol=1e-10)


class TestLogLikelihood:
    def test_one_dimensional(self):
        ll = log_likelihood(make_summary([1.0], n=2), (1,))
        assert ll == pytest.approx(-(math.log(2 * math.pi) + 1), abs=1e-12)
        assert ll == pytest.approx(-2.8379, abs=5e-5)

    def test_equal_eigenvalues_same_for_all_types(self):
        s = make_summary([2.5] * 4, n=37)
        values = {log_likelihood(s, g) for g in enumerate_types(4)}
        assert max(values) - min(values) <= 1e-10

    def test_equals_generic_gaussian_likelihood(self, rng):
        s = random_summary(rng, 4)
        for gamma in enumerate_types(4):
            m = fit(s, gamma)
            ref = gaussian_log_likelihood(s, m.mean[None], m.basis[None], m.eigenvalues[None])
            assert log_likelihood(s, gamma) == pytest.approx(ref[0], rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_refinement_monotone(self, seed):
        s = random_summary(np.random.default_rng(seed), 5)
        types = enumerate_types(5)
        ll = {g: log_likelihood(s, g) for g in types}
        for a in types:
            for b in types:
                if is_refinement(a, b):
                    assert ll[b] >= ll[a] - 1e-9 * abs(ll[a])


def dbic_expansion(delta, n):
    # BIC((1,1)) - BIC((2,)) at eigenvalues (1, 1 - delta), divided by n
    return 2 * math.log(n) / n - math.log((1 - delta / 2) ** 2 / (1 - delta))


class TestScore:
    def test_isotropic_prefers_merged(self):
        s = make_summary([1.3, 1.3], n=50)
        assert score(s, (2,)).bic < score(s, (1, 1)).bic

    def test_aicc_undefined_when_kappa_large(self):
        s = make_summary([5, 4, 3, 2, 1], n=10)
        sc = score(s, (1, 1, 1, 1, 1))
        assert sc.kappa == 20 and sc.aicc is None
        assert score(s, (5,)).aicc is not None

    def test_criteria_formulas(self, rng):
        s = random_summary(rng, 4, n=300)
        sc = score(s, (2, 1, 1))
        assert sc.bic == sc.kappa * math.log(300) - 2 * sc.log_likelihood
        assert sc.aic == 2 * sc.kappa - 2 * sc.log_likelihood
        assert sc.aicc == pytest.approx(2 * sc.kappa * 300 / (300 - sc.kappa - 1)
                                        - 2 * sc.log_likelihood, rel=1e-14)

    @pytest.mark.parametrize("delta,n", [(0.05, 100), (0.2, 1000), (0.4, 37), (0.7, 5000)])
    def test_pairwise_bic_difference(self, delta, n):
        s = make_summary([1.0, 1.0 - delta], n=n)
        diff = score(s, (1, 1)).bic - score(s, (2,)).bic
        assert diff == pytest.approx(n * dbic_expansion(delta, n), rel=1e-9, abs=1e-9)


class TestDensity:
    def test_standard_normal_at_zero(self):
        m = PsaModel(C((1,)), [0.0], [1.0], [[1.0]])
        assert density_log(m, [0.0]) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)

    def test_matches_dense_oracle(self, rng):
        m = PsaModel(C((2, 1)), rng.standard_normal(3), [3.0, 0.7], random_orthogonal(rng, 3))
        x = rng.standard_normal((20, 3)) * 2
        np.testing.assert_allclose(density_log(m, x), dense_log_density(x, m.mean, m.covariance),
                                   rtol=0, atol=1e-10)

    def test_within_block_rotation_invariance(self, rng):
        m = PsaModel(C((3, 2)), rng.standard_normal(5), [4.0, 1.5], random_orthogonal(rng, 5))
        x = rng.standard_normal((30, 5))
        rotated = m.with_frame(0, m.frames[0] @ random_orthogonal(rng, 3))
        rotated = rotated.with_frame(1, rotated.frames[1] @ random_orthogonal(rng, 2))
        np.testing.assert_allclose(density_log(rotated, x), density_log(m, x), atol=1e-10)

    def test_integrates_to_one(self):
        m = PsaModel(C((1,)), [0.3], [2.0], [[1.0]])
        grid = np.linspace(0.3 - 20, 0.3 + 20, 400001)
        f = np.exp(density_log(m, grid[:, None]))
        mass = np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(grid))
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_dimension_mismatch(self):
        m = PsaModel(C((2,)), [0.0, 0.0], [1.0], np.eye(2))
        with pytest.raises(DataError):
            density_log(m, [1.0, 2.0, 3.0])


class TestSample:
    def test_isotropic_covariance(self):
        m = PsaModel(C((3,)), np.zeros(3), [2.0], random_orthogonal(np.random.default_rng(1), 3))
        x = sample(m, 50000, seed=3)
        cov = np.cov(x.T, bias=True)
        np.testing.assert_allclose(cov, 2.0 * np.eye(3), atol=0.05 * 2.0)

    def test_single_draw_and_determinism(self):
        m = PsaModel(C((1, 1)), [1.0, -1.0], [2.0, 1.0], np.eye(2))
        a, b = sample(m, 1, seed=11), sample(m, 1, seed=11)
        assert a.shape == (1, 2) and np.array_equal(a, b)
        assert not np.array_equal(a, sample(m, 1, seed=12))

    def test_mean(self):
        mu = np.array([5.0, -2.0, 0.5])
        m = PsaModel(C((1, 2)), mu, [4.0, 1.0], random_orthogonal(np.random.default_rng(2), 3))
        x = sample(m, 100000, seed=0)
        assert np.all(np.abs(x.mean(axis=0) - mu) < 3 * math.sqrt(4.0 / 100000))

    def test_covariance_structure(self):
        q = random_orthogonal(np.random.default_rng(4), 4)
        m = PsaModel(C((2, 2)), np.zeros(4), [5.0, 1.0], q)
        s = summarize(sample(m, 40000, seed=9))
        np.testing.assert_allclose(s.eigenvalues, [5, 5, 1, 1], rtol=0.05)

    def test_rejects_zero_count(self):
        m = PsaModel(C((1,)), [0.0], [1.0], [[1.0]])
        with pytest.raises(DataError):
            sample(m, 0)


class TestSerialization:
    def test_roundtrip_lossless(self, rng):
        s = random_summary(rng, 5)
        m = fit(s, (2, 3))
        back = PsaModel.from_json(m.to_json())
        assert back.gamma == m.gamma and back.n == m.n
        for a, b in [(back.mean, m.mean), (back.block_eigenvalues, m.block_eigenvalues),
                     (back.basis, m.basis)]:
            assert np.array_equal(a, b)

    def test_row_major_basis(self):
        q = random_orthogonal(np.random.default_rng(0), 2)
        doc = json.loads(PsaModel(C((1, 1)), [0, 0], [2.0, 1.0], q).to_json())
        assert doc["basis"][0] == q[0].tolist()

    def test_rejects_bad_documents(self):
        with pytest.raises(DataError):
            PsaModel.from_dict({"gamma": [2]})
        with pytest.raises(DataError):
            PsaModel.from_dict({"gamma": [1, 1], "mean": [0, 0], "block_eigenvalues": [1, 2],
                                "basis": [[1, 0], [0, 1]], "n": 3})
