"""Effective channel, per-user SINR and the analytic/asymptotic SINR forms.

The per-realization evaluation is semi-analytic: the effective K x K
channel maps data symbols to users, while everything random besides the
channel estimates (symbols, relay/user noise, error directions) enters
through its second-order statistics, using E{Omega A Omega^H} = tr(A) I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beamformers import BeamformerDesign, rho_r_svd_rzf
from .model import ChannelRealization, SystemConfig
from .spectra import mu, nu

__all__ = [
    "EffectiveLink",
    "SinrReport",
    "EigExpectations",
    "effective_channel",
    "noise_power",
    "effective_link",
    "sinr_exact",
    "sinr_report",
    "noise_power_single_relay_closed",
    "sinr_analytic_single",
    "sinr_relay_mmse",
    "sinr_dest_idealized",
    "expectations",
    "sinr_asymptotic",
    "noise_power_multirelay",
    "sum_rate",
]

# denominators below this underflow guard report an infinite SINR
_DIVERGENCE_FLOOR = 1e-300


@dataclass(frozen=True)
class EffectiveLink:
    """Effective K x K signal matrix and per-user effective noise power."""

    H_eff: np.ndarray
    noise_power: np.ndarray


@dataclass(frozen=True)
class SinrReport:
    """Per-user SINRs (linear) and the two-slot sum rate for one realization."""

    per_user_sinr: np.ndarray
    scheme: str
    config_echo: SystemConfig
    sum_rate: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sum_rate", sum_rate(self.per_user_sinr))


@dataclass(frozen=True)
class EigExpectations:
    """Arithmetic means of x/(x+a), x/(x+a)^2, x^2/(x+a)^2 per eigenvalue family."""

    E1_theta: float
    E2_theta: float
    E3_theta: float
    E1_lambda: float
    E2_lambda: float
    E3_lambda: float


def effective_channel(design: BeamformerDesign, realization: ChannelRealization,
                      config: SystemConfig) -> np.ndarray:
    """Sum over relays of rho_s rho_r G_hat_r W_r H_hat_r F (K x K)."""
    chain = realization.G_hat @ design.W @ realization.H_hat @ design.F
    if chain.shape[-2:] != (config.K, config.K):
        raise ValueError(f"effective channel has shape {chain.shape[-2:]}, expected K x K")
    return design.rho_s * np.einsum("r,rij->ij", design.rho_r, chain)


def noise_power(design: BeamformerDesign, realization: ChannelRealization,
                config: SystemConfig) -> np.ndarray:
    """Per-user effective noise power E{n_k n_k*} (identical across users).

    For each relay, with gw = G_hat_r W_r and whf = W_r H_hat_r F:

        rho_r^2 * ( e1^2 rho_s^2 / K * tr(F F^H) * tr(gw gw^H)
                    + e2^2 rho_s^2 * tr(whf whf^H)
                    + sigma1^2 / K * tr(gw gw^H)
                    + e2^2 sigma1^2 * tr(W W^H) )

    summed over relays, plus the destination floor sigma2^2.
    """
    K = config.K
    gw = realization.G_hat @ design.W
    whf = design.W @ realization.H_hat @ design.F
    t_gw = np.einsum("rij,rij->r", gw, gw.conj()).real
    t_whf = np.einsum("rij,rij->r", whf, whf.conj()).real
    t_w = np.einsum("rij,rij->r", design.W, design.W.conj()).real
    t_ff = float(np.einsum("ij,ij->", design.F, design.F.conj()).real)
    rs2 = design.rho_s**2
    per_relay = (config.e1_sq * rs2 / K * t_ff * t_gw
                 + config.e2_sq * rs2 * t_whf
                 + config.sigma1_sq / K * t_gw
                 + config.e2_sq * config.sigma1_sq * t_w)
    total = float((design.rho_r**2 * per_relay).sum()) + config.sigma2_sq
    return np.full(K, total)


def effective_link(design: BeamformerDesign, realization: ChannelRealization,
                   config: SystemConfig) -> EffectiveLink:
    return EffectiveLink(H_eff=effective_channel(design, realization, config),
                         noise_power=noise_power(design, realization, config))


def sinr_exact(H_eff: np.ndarray, noise_power: np.ndarray) -> np.ndarray:
    """Per-user SINR of the effective link.

    SINR_k = |H_kk|^2 / (sum_{j != k} |H_kj|^2 + noise_k); a denominator
    below 1e-300 (zero-noise ZF corner) reports +inf.
    """
    H_eff = np.asarray(H_eff)
    power = np.abs(H_eff) ** 2
    desired = np.diagonal(power).copy()
    interference = power.sum(axis=1) - desired
    den = interference + np.asarray(noise_power, dtype=float)
    out = np.empty_like(desired)
    tiny = den < _DIVERGENCE_FLOOR
    out[tiny] = np.inf
    out[~tiny] = desired[~tiny] / den[~tiny]
    return out


def sinr_report(design: BeamformerDesign, realization: ChannelRealization,
                config: SystemConfig) -> SinrReport:
    link = effective_link(design, realization, config)
    return SinrReport(per_user_sinr=sinr_exact(link.H_eff, link.noise_power),
                      scheme=design.scheme, config_echo=config)


def noise_power_single_relay_closed(theta, lam, alpha: float, config: SystemConfig) -> float:
    """Closed-form effective noise power of the single-relay SVD-RZF design.

    N(theta, lam) = (rho_s^2 rho_r^2 e1^2 + rho_r^2 sigma1^2 / K) * sum lam^2/(lam+a)^2
                  + (rho_s^2 rho_r^2 e2^2 St / K + rho_r^2 e2^2 sigma1^2) * sum lam/(lam+a)^2
                  + sigma2^2

    with rho_s, rho_r the design's own closed-form power factors.
    """
    th = np.asarray(theta, dtype=float)
    la = np.asarray(lam, dtype=float)
    K = config.K
    rs2 = config.Ps / K
    rr2 = rho_r_svd_rzf(th, la, alpha, config) ** 2
    s3 = (la**2 / (la + alpha) ** 2).sum()
    s2 = (la / (la + alpha) ** 2).sum()
    return float((rs2 * rr2 * config.e1_sq + rr2 * config.sigma1_sq / K) * s3
                 + (rs2 * rr2 * config.e2_sq * th.sum() / K + rr2 * config.e2_sq * config.sigma1_sq) * s2
                 + config.sigma2_sq)


def sinr_analytic_single(theta, lam, alpha: float, config: SystemConfig) -> np.ndarray:
    """Analytic per-user SINR of the single-relay SVD-RZF design.

    Desired power is theta_k * mu(lam/(lam+a)); interference is
    (sum_{j != k} theta_j) * nu(lam/(lam+a)); both scale with
    rho_s^2 rho_r^2, and the noise is the closed form above.
    """
    th = np.asarray(theta, dtype=float)
    la = np.asarray(lam, dtype=float)
    x = la / (la + alpha)
    rs2 = config.Ps / config.K
    rr2 = rho_r_svd_rzf(th, la, alpha, config) ** 2
    noise = noise_power_single_relay_closed(th, la, alpha, config)
    desired = rs2 * rr2 * th * mu(x)
    interference = rs2 * rr2 * (th.sum() - th) * nu(x)
    den = interference + noise
    out = np.empty_like(desired)
    tiny = den < _DIVERGENCE_FLOOR
    out[tiny] = np.inf
    out[~tiny] = desired[~tiny] / den[~tiny]
    return out


def sinr_relay_mmse(theta_r, alpha_mmse: float, config: SystemConfig) -> float:
    """SINR of one user's stream after the MMSE receiver at a relay."""
    th = np.asarray(theta_r, dtype=float)
    M = config.M
    x = th / (th + alpha_mmse)
    num = config.Ps / M * mu(x)
    den = (config.Ps * (M - 1) / M * nu(x)
           + (config.e1_sq * config.Ps + config.sigma1_sq) / M * (th / (th + alpha_mmse) ** 2).sum())
    return float(num / den)


def sinr_dest_idealized(theta, alpha_mmse: float, config: SystemConfig, rho_r: float) -> float:
    """Destination SINR with the forward channels idealized to identity.

    The R relay contributions add coherently, so the desired power scales
    with R^2 while interference and relay noise scale with R.
    """
    if not rho_r > 0:
        raise ValueError(f"rho_r must be > 0, got {rho_r!r}")
    th = np.asarray(theta, dtype=float)
    M, R = config.M, config.R
    x = th / (th + alpha_mmse)
    num = config.Ps * R**2 / M * mu(x)
    den = (R * config.Ps * (M - 1) / M * nu(x)
           + R * (config.e1_sq * config.Ps + config.sigma1_sq) / M * (th / (th + alpha_mmse) ** 2).sum()
           + config.sigma2_sq / rho_r**2)
    return float(num / den)


def expectations(theta_samples, lambda_samples, alpha_mmse: float,
                 alpha_rzf: float) -> EigExpectations:
    """Arithmetic-mean eigenvalue functionals for both channel families."""
    th = np.asarray(theta_samples, dtype=float).ravel()
    la = np.asarray(lambda_samples, dtype=float).ravel()
    if th.size == 0 or la.size == 0:
        raise ValueError("expectations needs non-empty eigenvalue samples")
    return EigExpectations(
        E1_theta=float(np.mean(th / (th + alpha_mmse))),
        E2_theta=float(np.mean(th / (th + alpha_mmse) ** 2)),
        E3_theta=float(np.mean(th**2 / (th + alpha_mmse) ** 2)),
        E1_lambda=float(np.mean(la / (la + alpha_rzf))),
        E2_lambda=float(np.mean(la / (la + alpha_rzf) ** 2)),
        E3_lambda=float(np.mean(la**2 / (la + alpha_rzf) ** 2)),
    )


def sinr_asymptotic(config: SystemConfig, exps: EigExpectations) -> float:
    """Large-R asymptotic SINR of the robust MMSE-RZF design.

    Uses the 1/M^2 approximation of the Haar fourth moments; rho_r^-2 is
    rebuilt from the same expectations as in the design.
    """
    Ps, Pr = config.Ps, config.Pr
    e1, e2 = config.e1_sq, config.e2_sq
    s1, s2 = config.sigma1_sq, config.sigma2_sq
    M, R = config.M, config.R
    inv_rho_sq = (Ps / Pr) * exps.E3_theta * exps.E2_lambda \
        + ((e1 * Ps + s1) * M / Pr) * exps.E2_theta * exps.E2_lambda
    num = Ps / M * (R * exps.E1_theta * exps.E1_lambda) ** 2
    den = (Ps * R * (M - 1) / M**2 * exps.E3_theta * exps.E3_lambda
           + (e1 * Ps + s1) * R * exps.E2_theta * exps.E3_lambda
           + Ps * R * e2 * exps.E3_theta * exps.E2_lambda
           + e2 * s1 * R * M * exps.E2_theta * exps.E2_lambda
           + s2 * inv_rho_sq)
    if den < _DIVERGENCE_FLOOR:
        return math.inf
    return float(num / den)


def noise_power_multirelay(design: BeamformerDesign, realization: ChannelRealization,
                           config: SystemConfig, k: int) -> float:
    """Effective noise power at user k with per-row relay gains resolved.

    Refines the trace/K treatment: the backward-error and relay-noise
    contributions use the k-th row norm of rho_r G_hat_r W_r.
    """
    gw = realization.G_hat @ design.W
    row = design.rho_r * np.linalg.norm(gw[:, k, :], axis=1)
    wh = design.W @ realization.H_hat
    t_wh = np.einsum("rij,rij->r", wh, wh.conj()).real
    t_w = np.einsum("rij,rij->r", design.W, design.W.conj()).real
    rr2 = design.rho_r**2
    return float((config.e1_sq * config.Ps + config.sigma1_sq) * (row**2).sum()
                 + config.Ps * config.e2_sq / config.M * (rr2 * t_wh).sum()
                 + config.e2_sq * config.sigma1_sq * (rr2 * t_w).sum()
                 + config.sigma2_sq)


def sum_rate(per_user_sinr) -> float:
    """Two-slot sum rate 0.5 * sum_k log2(1 + SINR_k) in bits/s/Hz."""
    s = np.asarray(per_user_sinr, dtype=float)
    return float(0.5 * np.log2(1.0 + s).sum())
