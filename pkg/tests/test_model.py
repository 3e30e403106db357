import numpy as np
import pytest

from relaybf.model import (ConfigError, SystemConfig, config_from_mapping,
                           generate_realization, true_channels)


def test_config_rejects_too_many_users():
    with pytest.raises(ConfigError, match="M >= K and N >= K"):
        SystemConfig(M=2, N=2, K=4)


def test_config_rejects_nonpositive_power():
    with pytest.raises(ConfigError):
        SystemConfig(M=4, N=4, K=4, Ps=0.0)
    with pytest.raises(ConfigError):
        SystemConfig(M=4, N=4, K=4, sigma2_sq=-1.0)
    with pytest.raises(ConfigError):
        SystemConfig(M=4, N=4, K=4, e1_sq=-0.1)


def test_snr_properties_and_with_snr():
    cfg = SystemConfig(M=4, N=4, K=4, Ps=100.0, Pr=10.0)
    assert cfg.snr_bc_db == pytest.approx(20.0)
    assert cfg.snr_fc_db == pytest.approx(10.0)
    cfg2 = cfg.with_snr(fc_db=20.0)
    assert cfg2.Pr == pytest.approx(100.0)
    assert cfg2.Ps == cfg.Ps


def test_config_from_mapping_snr_keys():
    cfg = config_from_mapping({"M": "4", "N": "4", "K": "4", "snr_bc_db": "20", "snr_fc_db": "10"})
    assert cfg.Ps == pytest.approx(100.0)
    assert cfg.Pr == pytest.approx(10.0)
    with pytest.raises(ConfigError, match="unknown config keys"):
        config_from_mapping({"M": 4, "N": 4, "K": 4, "bogus": 1})
    with pytest.raises(ConfigError, match="not both"):
        config_from_mapping({"M": 4, "N": 4, "K": 4, "Ps": 1.0, "snr_bc_db": 0.0})


def test_generate_realization_deterministic():
    cfg = SystemConfig(M=4, N=4, K=4, R=1)
    a = generate_realization(cfg, 7)
    b = generate_realization(cfg, 7)
    assert np.array_equal(a.H_hat, b.H_hat)
    assert np.array_equal(a.Omega1, b.Omega1)
    assert np.array_equal(a.G_hat, b.G_hat)
    assert np.array_equal(a.Omega2, b.Omega2)
    c = generate_realization(cfg, 8)
    assert not np.array_equal(a.H_hat, c.H_hat)


def test_generate_realization_shapes_multirelay():
    cfg = SystemConfig(M=6, N=5, K=4, R=3)
    rz = generate_realization(cfg, 0)
    assert rz.H_hat.shape == (3, 5, 6)
    assert rz.Omega1.shape == (3, 5, 6)
    assert rz.G_hat.shape == (3, 4, 5)
    assert rz.Omega2.shape == (3, 4, 5)
    # distinct relays get independent draws
    assert not np.array_equal(rz.H_hat[0], rz.H_hat[1])


def test_generate_realization_rejects_bad_seed():
    cfg = SystemConfig(M=4, N=4, K=4)
    with pytest.raises(ConfigError):
        generate_realization(cfg, -1)


def test_entry_statistics():
    # pooled over 2000 draws x 16 entries: SE of the mean square is ~0.006,
    # comfortably inside the +-0.02 contract
    cfg = SystemConfig(M=4, N=4, K=4, R=1)
    h = np.concatenate([generate_realization(cfg, 10_000 + t).H_hat.ravel()
                        for t in range(2000)])
    o = np.concatenate([generate_realization(cfg, 10_000 + t).Omega1.ravel()
                        for t in range(2000)])
    assert abs(np.mean(np.abs(h) ** 2) - 1.0) < 0.02
    assert abs(np.mean(h)) < 0.02
    # estimate and error direction are uncorrelated
    assert abs(np.mean(h * o.conj())) < 0.02


def test_true_channels_zero_error_identity():
    cfg = SystemConfig(M=4, N=4, K=4, e1_sq=0.0, e2_sq=0.0)
    rz = generate_realization(cfg, 3)
    H, G = true_channels(rz, cfg)
    assert np.array_equal(H, rz.H_hat)
    assert np.array_equal(G, rz.G_hat)


def test_true_channels_variance_adds():
    cfg = SystemConfig(M=4, N=4, K=4, e1_sq=0.2, e2_sq=0.0)
    samples = []
    for t in range(2000):
        rz = generate_realization(cfg, 20_000 + t)
        H, _ = true_channels(rz, cfg)
        samples.append(np.abs(H) ** 2)
    assert abs(np.mean(samples) - 1.2) < 0.03


def test_true_channels_linear_in_error_amplitude():
    base = SystemConfig(M=4, N=4, K=4)
    rz = generate_realization(base, 5)
    from dataclasses import replace
    H1, G1 = true_channels(rz, replace(base, e1_sq=0.04, e2_sq=0.04))
    H2, G2 = true_channels(rz, replace(base, e1_sq=0.16, e2_sq=0.16))
    # e doubles when e^2 quadruples; the offset from H_hat doubles with it
    np.testing.assert_allclose(H2 - rz.H_hat, 2 * (H1 - rz.H_hat), rtol=1e-12)
    np.testing.assert_allclose(G2 - rz.G_hat, 2 * (G1 - rz.G_hat), rtol=1e-12)
