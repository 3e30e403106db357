"""Beamformer construction: robust SVD-RZF, robust MMSE-RZF and baselines.

Every design fixes a source precoder F, per-relay processors W_r and the
power control factors.  rho_s = sqrt(Ps / tr(F^H F)) always; rho_r is
chosen so the relay budget Pr is met, with the estimation-error power
contribution replaced by its expectation e1^2 * Ps * tr(W W^H) (the relay
cannot observe the true channel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ChannelRealization, ConfigError, SystemConfig
from .spectra import svd_backward

__all__ = [
    "DesignError",
    "BeamformerDesign",
    "SCHEMES",
    "SVD_SCHEMES",
    "SQUARE_SCHEMES",
    "ROBUST_SVD_RZF",
    "SVD_ZF",
    "SVD_MF",
    "ZF_ZF",
    "MMSE_RZF",
    "ROBUST_MMSE_RZF",
    "alpha_svd_rzf",
    "alpha_svd_rzf_largeK",
    "alpha_mmse_opt",
    "alpha_rzf_opt",
    "rho_r_svd_rzf",
    "design_svd_rzf",
    "design_mmse_rzf_robust",
    "design_baseline",
    "build_design",
]

ROBUST_SVD_RZF = "robust-svd-rzf"
SVD_ZF = "svd-zf"
SVD_MF = "svd-mf"
ZF_ZF = "zf-zf"
MMSE_RZF = "mmse-rzf"
ROBUST_MMSE_RZF = "robust-mmse-rzf"

SCHEMES = (ROBUST_SVD_RZF, SVD_ZF, SVD_MF, ZF_ZF, MMSE_RZF, ROBUST_MMSE_RZF)
# schemes built on the backward-channel SVD; single relay only
SVD_SCHEMES = (ROBUST_SVD_RZF, SVD_ZF, SVD_MF)
# schemes requiring square M = N = K channels
SQUARE_SCHEMES = (ZF_ZF, MMSE_RZF, ROBUST_MMSE_RZF)

# singular values below this fraction of the largest count as zero
_RANK_RTOL = 1e-12


class DesignError(RuntimeError):
    """A beamformer cannot be built for this realization or configuration."""


@dataclass(frozen=True)
class BeamformerDesign:
    """Source precoder, relay processors and power factors of one scheme.

    F is M x K, W is stacked (R, N, N), rho_r holds one factor per relay
    (all equal for the expectation-normalized MMSE-RZF schemes).
    alpha_bc / alpha_fc are the regularizers actually used on the receive
    and transmit sides (0 where the side is plain SVD/ZF/MF).
    """

    F: np.ndarray
    W: np.ndarray
    rho_s: float
    rho_r: np.ndarray
    alpha_bc: float
    alpha_fc: float
    scheme: str


def alpha_svd_rzf(theta, config: SystemConfig) -> float:
    """Optimal forward regularizer of the single-relay SVD-RZF design.

    theta holds the K squared singular values of the estimated backward
    channel; the value trades the ZF power penalty against the residual
    interference caused by regularization.
    """
    th = np.asarray(theta, dtype=float)
    K = th.size
    if K < 2:
        raise ValueError("alpha_svd_rzf needs K >= 2")
    st = th.sum()
    e1, e2 = config.e1_sq, config.e2_sq
    Ps, Pr = config.Ps, config.Pr
    s1, s2 = config.sigma1_sq, config.sigma2_sq
    num = e2 * st / K + e2 * s1 * K / Ps + (s2 / Pr) * (st / K + K * e1 + s1 * K / Ps)
    den = st / ((K - 1) * (K + 1)) + e1 + s1 / Ps
    return num / den


def alpha_svd_rzf_largeK(config: SystemConfig) -> float:
    """Large-K limit of alpha_svd_rzf; independent of the realization."""
    e1, e2 = config.e1_sq, config.e2_sq
    Ps, Pr = config.Ps, config.Pr
    s1, s2 = config.sigma1_sq, config.sigma2_sq
    return config.K * ((e2 + e2 * s1 / Ps) / (1.0 + e1 + s1 / Ps) + s2 / Pr)


def alpha_mmse_opt(config: SystemConfig) -> float:
    """Optimal MMSE receive regularizer for the multi-relay design."""
    M, R = config.M, config.R
    ratio = config.Pr * R / config.sigma2_sq
    return (config.e1_sq + config.sigma1_sq / config.Ps) * (M + ratio) / (1.0 + ratio / (M + 1))


def alpha_rzf_opt(config: SystemConfig, E2_theta: float, E3_theta: float) -> float:
    """Optimal forward RZF regularizer from backward-eigenvalue expectations.

    E2_theta and E3_theta are the arithmetic means of theta/(theta+a)^2 and
    theta^2/(theta+a)^2 at a = alpha_mmse_opt (see metrics.expectations).
    """
    if not (E2_theta > 0 and E3_theta > 0):
        raise ValueError("alpha_rzf_opt needs positive eigenvalue expectations")
    e1, e2 = config.e1_sq, config.e2_sq
    Ps, Pr = config.Ps, config.Pr
    s1, s2 = config.sigma1_sq, config.sigma2_sq
    M, R = config.M, config.R
    num = (Ps * R * e2 + s2 * Ps / Pr) * E3_theta + (e2 * s1 * R * M + (e1 * Ps + s1) * M / Pr) * E2_theta
    den = (e1 * Ps + s1) * R * E2_theta + (Ps * R / M) * E3_theta
    if not den > 0:
        raise ValueError("alpha_rzf_opt: non-positive denominator")
    return num / den


def rho_r_svd_rzf(theta, lam, alpha: float, config: SystemConfig) -> float:
    """Closed-form relay power factor of the SVD-RZF design.

    Eigenvalue form, with the theta-weighted trace replaced by its Haar
    average (Sum theta / K) and the error power by e1^2 * Ps:

        rho_r^-2 * Pr = (Ps*St/K^2 + e1^2*Ps + sigma1^2) * sum lam/(lam+a)^2
    """
    th = np.asarray(theta, dtype=float)
    la = np.asarray(lam, dtype=float)
    K = config.K
    s2sum = (la / (la + alpha) ** 2).sum()
    front = config.Ps * th.sum() / K**2 + config.e1_sq * config.Ps + config.sigma1_sq
    return math.sqrt(config.Pr / (front * s2sum))


def _relay_power_factors(W: np.ndarray, H_hat: np.ndarray, F: np.ndarray,
                         rho_s: float, config: SystemConfig) -> np.ndarray:
    """Per-relay rho_r from the transmit-power trace on estimated channels.

    rho_r^-2 * Pr = rho_s^2 ||W H_hat F||_F^2 + (e1^2 Ps + sigma1^2) ||W||_F^2
    per relay; the e1^2 Ps term is the expectation surrogate for the error
    direction (rho_s^2 tr(F F^H) = Ps by construction).
    """
    whf = W @ H_hat @ F
    sig = rho_s**2 * np.einsum("rij,rij->r", whf, whf.conj()).real
    wnorm = np.einsum("rij,rij->r", W, W.conj()).real
    den = sig + (config.e1_sq * config.Ps + config.sigma1_sq) * wnorm
    return np.sqrt(config.Pr / den)


def _check_svd_preconditions(realization: ChannelRealization, config: SystemConfig):
    if config.R != 1 or realization.num_relays != 1:
        raise DesignError("SVD-based schemes require a single relay (R = 1)")
    if config.N != config.K:
        raise DesignError(f"SVD-based schemes require N = K, got N={config.N}, K={config.K}")


def _require_full_rank(mat: np.ndarray, what: str):
    s = np.linalg.svd(mat, compute_uv=False)
    if s[-1] <= _RANK_RTOL * s[0]:
        raise DesignError(f"{what} is rank deficient (smallest singular value {s[-1]:.3e})")


def _svd_chain(realization: ChannelRealization, config: SystemConfig,
               alpha: float, forward: str, scheme: str) -> BeamformerDesign:
    """Shared construction for the SVD receive side with a chosen forward precoder."""
    _check_svd_preconditions(realization, config)
    H_hat = realization.H_hat[0]
    G_hat = realization.G_hat[0]
    U, theta, V = svd_backward(H_hat)
    K = config.K
    F = V[:, :K]
    rho_s = math.sqrt(config.Ps / K)

    if forward == "rzf":
        gram = G_hat @ G_hat.conj().T
        if alpha == 0.0:
            _require_full_rank(G_hat, "forward Gram matrix G_hat G_hat^H at alpha = 0")
        W1 = G_hat.conj().T @ np.linalg.inv(gram + alpha * np.eye(K)) @ U.conj().T
    elif forward == "mf":
        W1 = G_hat.conj().T @ U.conj().T
    else:
        raise ValueError(f"unknown forward precoder {forward!r}")

    W = W1[None, :, :]
    rho_r = _relay_power_factors(W, realization.H_hat, F, rho_s, config)
    return BeamformerDesign(F=F, W=W, rho_s=rho_s, rho_r=rho_r,
                            alpha_bc=0.0, alpha_fc=alpha, scheme=scheme)


def design_svd_rzf(realization: ChannelRealization, config: SystemConfig,
                   alpha_mode="exact") -> BeamformerDesign:
    """Robust SVD-RZF design for the single relay case.

    F is the first K columns of V, the relay applies the regularized
    forward precoder after U^H.  alpha_mode selects the regularizer:
    "exact" (closed form from this realization's theta), "largeK"
    (realization-independent approximation) or a fixed non-negative number.
    """
    _check_svd_preconditions(realization, config)
    if alpha_mode == "exact":
        theta = svd_backward(realization.H_hat[0])[1]
        alpha = alpha_svd_rzf(theta, config)
    elif alpha_mode == "largeK":
        alpha = alpha_svd_rzf_largeK(config)
    else:
        alpha = float(alpha_mode)
        if alpha < 0:
            raise DesignError(f"fixed alpha must be >= 0, got {alpha}")
    return _svd_chain(realization, config, alpha, "rzf", ROBUST_SVD_RZF)


def _check_square(realization: ChannelRealization, config: SystemConfig, scheme: str):
    if not (config.M == config.N == config.K):
        raise DesignError(f"{scheme} requires M = N = K, got "
                          f"M={config.M}, N={config.N}, K={config.K}")
    if realization.num_relays != config.R:
        raise DesignError("realization relay count does not match config")


def _mmse_rzf_chain(realization: ChannelRealization, config: SystemConfig,
                    alpha_bc: float, alpha_fc: float, scheme: str) -> BeamformerDesign:
    """MMSE receive + RZF transmit at every relay, common expectation-based rho_r."""
    _check_square(realization, config, scheme)
    H_hat, G_hat = realization.H_hat, realization.G_hat
    M, R = config.M, config.R
    eye = np.eye(M)

    HtH = np.transpose(H_hat, (0, 2, 1)).conj() @ H_hat
    GGt = G_hat @ np.transpose(G_hat, (0, 2, 1)).conj()
    if alpha_bc == 0.0:
        for r in range(R):
            _require_full_rank(H_hat[r], f"backward channel of relay {r} at alpha_bc = 0")
    if alpha_fc == 0.0:
        for r in range(R):
            _require_full_rank(G_hat[r], f"forward channel of relay {r} at alpha_fc = 0")
    B_bc = np.linalg.inv(HtH + alpha_bc * eye)
    B_fc = np.linalg.inv(GGt + alpha_fc * eye)
    W = np.transpose(G_hat, (0, 2, 1)).conj() @ B_fc @ B_bc @ np.transpose(H_hat, (0, 2, 1)).conj()

    theta = np.linalg.eigvalsh(HtH).ravel()
    lam = np.linalg.eigvalsh(GGt).ravel()
    E2_theta = float(np.mean(theta / (theta + alpha_bc) ** 2))
    E2_lam = float(np.mean(lam / (lam + alpha_fc) ** 2))
    E3_theta = float(np.mean(theta**2 / (theta + alpha_bc) ** 2))
    inv_rho_sq = (config.Ps / config.Pr) * E3_theta * E2_lam \
        + ((config.e1_sq * config.Ps + config.sigma1_sq) * M / config.Pr) * E2_theta * E2_lam
    rho_r = np.full(R, 1.0 / math.sqrt(inv_rho_sq))

    F = np.eye(M, dtype=complex)
    rho_s = math.sqrt(config.Ps / M)
    return BeamformerDesign(F=F, W=W, rho_s=rho_s, rho_r=rho_r,
                            alpha_bc=alpha_bc, alpha_fc=alpha_fc, scheme=scheme)


def design_mmse_rzf_robust(realization: ChannelRealization, config: SystemConfig) -> BeamformerDesign:
    """Robust MMSE-RZF design for the multi-relay case (M = N = K).

    Both regularizers come from the SINR-maximizing closed forms; the
    forward one uses arithmetic means of this realization's backward
    eigenvalue functionals.  No source precoding (F = I, rho_s^2 = Ps/M);
    one common rho_r for all relays, from the expectation form of the
    transmit-power constraint.
    """
    _check_square(realization, config, ROBUST_MMSE_RZF)
    alpha_bc = alpha_mmse_opt(config)
    HtH = np.transpose(realization.H_hat, (0, 2, 1)).conj() @ realization.H_hat
    theta = np.linalg.eigvalsh(HtH).ravel()
    E2_theta = float(np.mean(theta / (theta + alpha_bc) ** 2))
    E3_theta = float(np.mean(theta**2 / (theta + alpha_bc) ** 2))
    alpha_fc = alpha_rzf_opt(config, E2_theta, E3_theta)
    return _mmse_rzf_chain(realization, config, alpha_bc, alpha_fc, ROBUST_MMSE_RZF)


def _design_zf_zf(realization: ChannelRealization, config: SystemConfig) -> BeamformerDesign:
    """ZF receive (pseudo-inverse of H_hat) + ZF forward precoder, F = I."""
    if config.M != config.K:
        raise DesignError(f"zf-zf requires M = K, got M={config.M}, K={config.K}")
    if realization.num_relays != config.R:
        raise DesignError("realization relay count does not match config")
    K, R = config.K, config.R
    W = np.empty((R, config.N, config.N), dtype=complex)
    for r in range(R):
        G_hat = realization.G_hat[r]
        H_hat = realization.H_hat[r]
        _require_full_rank(G_hat, f"forward channel of relay {r}")
        _require_full_rank(H_hat, f"backward channel of relay {r}")
        fwd = G_hat.conj().T @ np.linalg.inv(G_hat @ G_hat.conj().T)
        W[r] = fwd @ np.linalg.pinv(H_hat, rcond=_RANK_RTOL)
    F = np.eye(config.M, dtype=complex)
    rho_s = math.sqrt(config.Ps / config.M)
    rho_r = _relay_power_factors(W, realization.H_hat, F, rho_s, config)
    return BeamformerDesign(F=F, W=W, rho_s=rho_s, rho_r=rho_r,
                            alpha_bc=0.0, alpha_fc=0.0, scheme=ZF_ZF)


def design_baseline(scheme: str, realization: ChannelRealization,
                    config: SystemConfig) -> BeamformerDesign:
    """Build one of the conventional reference schemes.

    svd-zf / svd-mf share the SVD receive side with a plain ZF or MF
    forward precoder; zf-zf inverts both hops; mmse-rzf uses the fixed
    regularizers alpha_bc = K*sigma1^2/Ps and alpha_fc = K*sigma2^2/Pr.
    """
    if scheme == SVD_ZF:
        return _svd_chain(realization, config, 0.0, "rzf", SVD_ZF)
    if scheme == SVD_MF:
        return _svd_chain(realization, config, 0.0, "mf", SVD_MF)
    if scheme == ZF_ZF:
        return _design_zf_zf(realization, config)
    if scheme == MMSE_RZF:
        alpha_bc = config.K * config.sigma1_sq / config.Ps
        alpha_fc = config.K * config.sigma2_sq / config.Pr
        return _mmse_rzf_chain(realization, config, alpha_bc, alpha_fc, MMSE_RZF)
    raise ConfigError(f"unknown baseline scheme {scheme!r}")


def build_design(scheme: str, realization: ChannelRealization,
                 config: SystemConfig) -> BeamformerDesign:
    """Dispatch a scheme tag to its constructor."""
    if scheme == ROBUST_SVD_RZF:
        return design_svd_rzf(realization, config, alpha_mode="exact")
    if scheme == ROBUST_MMSE_RZF:
        return design_mmse_rzf_robust(realization, config)
    if scheme in SCHEMES:
        return design_baseline(scheme, realization, config)
    raise ConfigError(f"unknown scheme {scheme!r}; known: {', '.join(SCHEMES)}")
