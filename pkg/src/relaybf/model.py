"""System configuration and random channel generation for the two-hop network.

The network has a base station with M antennas, R relays with N antennas
each and K single-antenna users.  Channels are flat Rayleigh: every entry
is unit-variance circularly-symmetric complex Gaussian.  Receivers only
know estimates; the true backward/forward channels are

    H_r = H_hat_r + e1 * Omega1_r,      G_r = G_hat_r + e2 * Omega2_r,

with the error matrices drawn from the same ensemble, independent of the
estimates, and e1^2 / e2^2 the estimation error powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ConfigError",
    "SystemConfig",
    "ChannelRealization",
    "config_from_mapping",
    "generate_realization",
    "true_channels",
]

# role indices keyed into each matrix's seed, so draws do not depend on
# generation order
_ROLE_H_HAT = 0
_ROLE_OMEGA1 = 1
_ROLE_G_HAT = 2
_ROLE_OMEGA2 = 3


class ConfigError(ValueError):
    """A SystemConfig violates the model constraints."""


@dataclass(frozen=True)
class SystemConfig:
    """Scalar parameters of the relaying network (all powers linear)."""

    M: int
    N: int
    K: int
    R: int = 1
    Ps: float = 1.0
    Pr: float = 1.0
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0
    e1_sq: float = 0.0
    e2_sq: float = 0.0

    def __post_init__(self):
        for name in ("M", "N", "K", "R"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.M < self.K or self.N < self.K:
            raise ConfigError(
                "config requires M >= K and N >= K "
                f"(got M={self.M}, N={self.N}, K={self.K})"
            )
        for name in ("Ps", "Pr", "sigma1_sq", "sigma2_sq"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("e1_sq", "e2_sq"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def snr_bc_db(self) -> float:
        """Backward-channel SNR 10*log10(Ps / sigma1^2)."""
        return 10.0 * math.log10(self.Ps / self.sigma1_sq)

    @property
    def snr_fc_db(self) -> float:
        """Forward-channel SNR 10*log10(Pr / sigma2^2)."""
        return 10.0 * math.log10(self.Pr / self.sigma2_sq)

    def with_snr(self, bc_db: float | None = None, fc_db: float | None = None) -> "SystemConfig":
        """Return a copy with Ps and/or Pr set from SNRs in dB (sigma^2 fixed)."""
        cfg = self
        if bc_db is not None:
            cfg = replace(cfg, Ps=cfg.sigma1_sq * 10.0 ** (bc_db / 10.0))
        if fc_db is not None:
            cfg = replace(cfg, Pr=cfg.sigma2_sq * 10.0 ** (fc_db / 10.0))
        return cfg


_INT_KEYS = ("M", "N", "K", "R")
_FLOAT_KEYS = ("Ps", "Pr", "sigma1_sq", "sigma2_sq", "e1_sq", "e2_sq")


def config_from_mapping(mapping: dict) -> SystemConfig:
    """Build a SystemConfig from a flat key/value mapping.

    Accepts the SystemConfig field names plus ``snr_bc_db`` / ``snr_fc_db``,
    which set Ps / Pr as 10^(dB/10) times the matching noise variance
    (sigma1_sq = sigma2_sq = 1 unless given).  Unknown keys raise.
    """
    known = set(_INT_KEYS) | set(_FLOAT_KEYS) | {"snr_bc_db", "snr_fc_db"}
    unknown = set(mapping) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key in _INT_KEYS:
        if key in mapping:
            kwargs[key] = int(mapping[key])
    for key in _FLOAT_KEYS:
        if key in mapping:
            kwargs[key] = float(mapping[key])
    if "M" not in kwargs or "N" not in kwargs or "K" not in kwargs:
        raise ConfigError("config must define at least M, N and K")
    if "snr_bc_db" in mapping:
        if "Ps" in mapping:
            raise ConfigError("give either Ps or snr_bc_db, not both")
        kwargs["Ps"] = kwargs.get("sigma1_sq", 1.0) * 10.0 ** (float(mapping["snr_bc_db"]) / 10.0)
    if "snr_fc_db" in mapping:
        if "Pr" in mapping:
            raise ConfigError("give either Pr or snr_fc_db, not both")
        kwargs["Pr"] = kwargs.get("sigma2_sq", 1.0) * 10.0 ** (float(mapping["snr_fc_db"]) / 10.0)
    return SystemConfig(**kwargs)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of estimated channels and error directions for all relays.

    Arrays are stacked over relays: H_hat and Omega1 have shape (R, N, M),
    G_hat and Omega2 have shape (R, K, N).  Immutable after construction.
    """

    H_hat: np.ndarray
    Omega1: np.ndarray
    G_hat: np.ndarray
    Omega2: np.ndarray
    seed: int

    @property
    def num_relays(self) -> int:
        return self.H_hat.shape[0]


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    # real and imaginary parts each N(0, 1/2) so the complex entry has unit variance
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def _matrix_rng(seed: int, relay: int, role: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, relay, role)))


def generate_realization(config: SystemConfig, seed: int) -> ChannelRealization:
    """Draw one channel realization, reproducibly keyed by (seed, relay, role).

    Each matrix gets its own generator seeded from the tuple, so the draw is
    identical no matter in which order matrices or realizations are produced.
    """
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    seed = int(seed)
    R, N, M, K = config.R, config.N, config.M, config.K
    H_hat = np.empty((R, N, M), dtype=complex)
    Omega1 = np.empty((R, N, M), dtype=complex)
    G_hat = np.empty((R, K, N), dtype=complex)
    Omega2 = np.empty((R, K, N), dtype=complex)
    for r in range(R):
        H_hat[r] = _complex_gaussian(_matrix_rng(seed, r, _ROLE_H_HAT), (N, M))
        Omega1[r] = _complex_gaussian(_matrix_rng(seed, r, _ROLE_OMEGA1), (N, M))
        G_hat[r] = _complex_gaussian(_matrix_rng(seed, r, _ROLE_G_HAT), (K, N))
        Omega2[r] = _complex_gaussian(_matrix_rng(seed, r, _ROLE_OMEGA2), (K, N))
    return ChannelRealization(H_hat=H_hat, Omega1=Omega1, G_hat=G_hat, Omega2=Omega2, seed=seed)


def true_channels(realization: ChannelRealization, config: SystemConfig):
    """Return the true stacked channels (H, G) = (H_hat + e1*Omega1, G_hat + e2*Omega2)."""
    e1 = math.sqrt(config.e1_sq)
    e2 = math.sqrt(config.e2_sq)
    H = realization.H_hat + e1 * realization.Omega1
    G = realization.G_hat + e2 * realization.Omega2
    return H, G
