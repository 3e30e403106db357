"""Shared oracles for the test suite."""

import numpy as np
import pytest

from relaybf.model import ChannelRealization, SystemConfig


def complex_gaussian(rng, shape, scale=1.0):
    """Unit-variance circularly-symmetric complex Gaussian entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5) * scale


def synthetic_realization(H_hat, G_hat, Omega1=None, Omega2=None):
    """Wrap explicit stacked matrices as a ChannelRealization."""
    H_hat = np.asarray(H_hat, dtype=complex)
    G_hat = np.asarray(G_hat, dtype=complex)
    if H_hat.ndim == 2:
        H_hat = H_hat[None]
    if G_hat.ndim == 2:
        G_hat = G_hat[None]
    if Omega1 is None:
        Omega1 = np.zeros_like(H_hat)
    if Omega2 is None:
        Omega2 = np.zeros_like(G_hat)
    return ChannelRealization(H_hat=H_hat, Omega1=np.asarray(Omega1, dtype=complex),
                              G_hat=G_hat, Omega2=np.asarray(Omega2, dtype=complex), seed=0)


def lemma3_profile(lam, A, B, C, D, E, alpha):
    """The large-K SINR profile whose maximizer lemma3_maximizer returns.

    Vectorized over alpha.
    """
    lam = np.asarray(lam, dtype=float)[:, None]
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    S1 = (lam / (lam + a)).sum(axis=0)
    S2 = (lam / (lam + a) ** 2).sum(axis=0)
    S3 = (lam**2 / (lam + a) ** 2).sum(axis=0)
    out = (A * S1**2 + B * S3) / (C * S2 + D * S3 + E * S1**2)
    return out if out.size > 1 else float(out[0])


def idealized_rho_r(theta, alpha_mmse, config):
    """Relay power factor when the forward channel is idealized to identity.

    rho_r^-2 * Pr = Ps/M * sum theta^2/(theta+a)^2
                    + (e1^2 Ps + sigma1^2) * sum theta/(theta+a)^2
    """
    th = np.asarray(theta, dtype=float)
    x2 = np.sum(th**2 / (th + alpha_mmse) ** 2)
    s2 = np.sum(th / (th + alpha_mmse) ** 2)
    inv = (config.Ps / config.M * x2 + (config.e1_sq * config.Ps + config.sigma1_sq) * s2) / config.Pr
    return 1.0 / np.sqrt(inv)


def simulated_noise_power(design, realization, config, trials, rng, chunk=20000):
    """Explicit-draw estimate of the per-trial user-averaged effective noise.

    Draws symbols, relay noise, destination noise and fresh error directions
    per trial and evaluates the modeled noise vector

        n = sum_r rho_s rho_r (e1 G_hat W Omega1 + e2 Omega2 W H_hat) F s
            + sum_r rho_r (G_hat + e2 Omega2) W n_r + n_D

    Returns the per-trial samples of mean_k |n_k|^2.
    """
    K, N, M = config.K, config.N, config.M
    e1, e2 = np.sqrt(config.e1_sq), np.sqrt(config.e2_sq)
    sig1, sig2 = np.sqrt(config.sigma1_sq), np.sqrt(config.sigma2_sq)
    R = realization.num_relays
    GW = [realization.G_hat[r] @ design.W[r] for r in range(R)]
    WHF = [design.W[r] @ realization.H_hat[r] @ design.F for r in range(R)]
    samples = np.empty(trials)
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        s = complex_gaussian(rng, (c, K))
        noise = complex_gaussian(rng, (c, K), sig2)
        Fs = np.einsum("mk,ck->cm", design.F, s)
        for r in range(R):
            rr, rs = design.rho_r[r], design.rho_s
            O1 = complex_gaussian(rng, (c, N, M))
            O2 = complex_gaussian(rng, (c, K, N))
            nr = complex_gaussian(rng, (c, N), sig1)
            noise += rs * rr * e1 * np.einsum("kn,cnm,cm->ck", GW[r], O1, Fs)
            whfs = np.einsum("nk,ck->cn", WHF[r], s)
            noise += rs * rr * e2 * np.einsum("ckn,cn->ck", O2, whfs)
            noise += rr * np.einsum("kn,cn->ck", GW[r], nr)
            wnr = np.einsum("nm,cm->cn", design.W[r], nr)
            noise += rr * e2 * np.einsum("ckn,cn->ck", O2, wnr)
        samples[done:done + c] = np.mean(np.abs(noise) ** 2, axis=1)
        done += c
    return samples


@pytest.fixture
def cfg4():
    """Reference single-relay configuration at 20 dB / 20 dB."""
    return SystemConfig(M=4, N=4, K=4, R=1, Ps=100.0, Pr=100.0, e1_sq=0.1, e2_sq=0.1)
