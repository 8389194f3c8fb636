import numpy as np
import pytest

from sdisac.channels import (CsiModel, complex_normal, exponential_correlation,
                             gauss_markov_realization, rayleigh_channel,
                             trial_rng)
from sdisac.core import compute_null_space_basis
from sdisac.errors import InvalidRho


def test_rayleigh_is_deterministic():
    assert np.array_equal(rayleigh_channel(4, 20, 7), rayleigh_channel(4, 20, 7))


def test_rayleigh_moments():
    h = rayleigh_channel(100, 1000, 1).ravel()
    assert abs(h.mean()) <= 0.02
    assert 0.98 <= np.mean(np.abs(h) ** 2) <= 1.02


def test_rayleigh_full_rank():
    s = np.linalg.svd(rayleigh_channel(4, 20, 3), compute_uv=False)
    assert s[3] / s[0] > 1e-6


def test_trial_streams_are_order_independent():
    a = trial_rng(5, 3, "channel").standard_normal(4)
    trial_rng(5, 2, "channel").standard_normal(100)
    assert np.array_equal(a, trial_rng(5, 3, "channel").standard_normal(4))
    assert not np.array_equal(a, trial_rng(5, 3, "init").standard_normal(4))
    assert not np.array_equal(a, trial_rng(5, 4, "channel").standard_normal(4))


def test_exponential_correlation():
    assert np.allclose(exponential_correlation(5, 0.0).entries, np.eye(5))
    R = exponential_correlation(3, 0.6)
    assert R.entries[0, 2] == pytest.approx(0.36)
    assert np.allclose(np.diag(R.entries), 1)
    with pytest.raises(InvalidRho):
        exponential_correlation(3, 1.1)


@pytest.mark.parametrize("rho", [0.6, 0.95, 0.5 + 0.5j, -0.3, 1.0])
def test_correlation_square_root(rho):
    R = exponential_correlation(20, rho)
    assert np.allclose(R.entries, R.entries.conj().T)
    assert np.linalg.norm(R.sqrt @ R.sqrt - R.entries) <= 1e-10
    assert np.allclose(R.sqrt, R.sqrt.conj().T)


def test_gauss_markov_limits():
    H_hat = rayleigh_channel(4, 20, 0)
    R = exponential_correlation(20, 0.6)
    H_true, H_est = gauss_markov_realization(CsiModel(H_hat, 0.0, R), 1)
    assert np.allclose(H_true, H_hat @ R.sqrt) and np.allclose(H_est, H_true)
    H_true, H_est = gauss_markov_realization(CsiModel(H_hat, 1.0, R), 1)
    E = complex_normal(1, H_hat.shape)
    assert np.allclose(H_true, E @ R.sqrt)
    assert np.allclose(H_est, 0)


def test_gauss_markov_preserves_variance():
    mu = 0.3
    H_hat = rayleigh_channel(100, 100, 11)
    E = complex_normal(12, H_hat.shape)
    mix = np.sqrt(1 - mu**2) * H_hat + mu * E
    assert 0.97 <= np.mean(np.abs(mix) ** 2) <= 1.03


def test_gauss_markov_error_energy():
    mu = 0.3
    R = exponential_correlation(20, 0.6)
    H_hat = rayleigh_channel(4, 20, 0)
    ratios = []
    for seed in range(1000):
        H_true, H_est = gauss_markov_realization(CsiModel(H_hat, mu, R), seed)
        ratios.append(np.linalg.norm(H_true - H_est) ** 2 / (4 * np.trace(R.entries).real))
    assert np.mean(ratios) == pytest.approx(mu**2, rel=0.05)


def test_estimate_null_space_misses_true_channel():
    R = exponential_correlation(20, 0.6)
    H_true, H_est = gauss_markov_realization(CsiModel(rayleigh_channel(4, 20, 0), 0.3, R), 1)
    Delta = compute_null_space_basis(H_est)
    assert np.linalg.norm(H_est @ Delta) <= 1e-10 * np.linalg.norm(H_est)
    assert np.linalg.norm(H_true @ Delta) > 0.1


def test_csi_model_rejects_bad_mu():
    with pytest.raises(ValueError):
        CsiModel(np.ones((1, 2)), 1.5)
