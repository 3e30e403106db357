"""Monte Carlo experiment driver: sweeps, averaging and figure presets.

A sweep runs `trials` channel realizations per grid point and scheme,
seeded from (master_seed, branch, grid index, trial index) so the result
is bit-reproducible at any level of parallelism.  All schemes at a grid
point see the same realizations (common random numbers).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import beamformers, metrics
from .beamformers import SCHEMES, SVD_SCHEMES, DesignError, build_design
from .model import ConfigError, SystemConfig, generate_realization

__all__ = [
    "SWEEP_AXES",
    "AVERAGE_DOMAINS",
    "PRESET_NAMES",
    "ExperimentSpec",
    "ResultRow",
    "ResultTable",
    "run_experiment",
    "preset",
]

SWEEP_AXES = ("snr_bc_db", "snr_fc_db", "K", "error_power", "R")
AVERAGE_DOMAINS = ("linear_sinr", "db_sinr", "sum_rate")
PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

_ALL_SCHEMES = SCHEMES
_MULTI_RELAY_SCHEMES = (beamformers.ROBUST_MMSE_RZF, beamformers.MMSE_RZF, beamformers.ZF_ZF)


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: base configuration, swept axis, schemes and averaging."""

    base_config: SystemConfig
    sweep_axis: str
    sweep_values: tuple
    schemes: tuple
    trials: int = 1000
    master_seed: int = 1234
    average_domain: str = "linear_sinr"
    # non-empty only for the relay-count study, which runs the whole sweep
    # once per estimation-error power and suffixes the scheme labels
    error_branches: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {self.sweep_axis!r}; known: {SWEEP_AXES}")
        if self.average_domain not in AVERAGE_DOMAINS:
            raise ConfigError(f"unknown average domain {self.average_domain!r}")
        vals = tuple(self.sweep_values)
        if not vals:
            raise ConfigError("sweep_values must be non-empty")
        if any(b >= a for a, b in zip(vals[1:], vals)):
            raise ConfigError("sweep_values must be strictly increasing")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be >= 0")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ConfigError(f"unknown schemes: {sorted(unknown)}")
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        if any(e < 0 for e in self.error_branches):
            raise ConfigError("error branch powers must be >= 0")
        # reject single-relay schemes on multi-relay grids up front
        relay_counts = {self.base_config.R}
        if self.sweep_axis == "R":
            relay_counts = set(int(v) for v in vals)
        if max(relay_counts) > 1 and set(self.schemes) & set(SVD_SCHEMES):
            raise ConfigError("SVD-based schemes require R = 1 across the whole sweep")
        # exercise every grid configuration once so bad sweeps fail early
        for v in vals:
            _config_at(self.base_config, self.sweep_axis, v)


def _config_at(base: SystemConfig, axis: str, value) -> SystemConfig:
    if axis == "snr_bc_db":
        return base.with_snr(bc_db=float(value))
    if axis == "snr_fc_db":
        return base.with_snr(fc_db=float(value))
    if axis == "K":
        k = int(value)
        return replace(base, M=k, N=k, K=k)
    if axis == "error_power":
        return replace(base, e1_sq=float(value), e2_sq=float(value))
    if axis == "R":
        return replace(base, R=int(value))
    raise ConfigError(f"unknown sweep axis {axis!r}")


@dataclass(frozen=True)
class ResultRow:
    """Aggregated metric for one (sweep value, scheme) cell."""

    sweep_value: float
    scheme: str
    mean_metric: float
    stderr_metric: float
    trials: int
    alpha_bc_mean: float
    alpha_fc_mean: float
    excluded: int = 0
    failed: bool = False
    reason: str = ""


@dataclass(frozen=True)
class ResultTable:
    """Rows of a finished experiment plus the spec that produced them."""

    spec: ExperimentSpec
    rows: tuple


def _trial_seed(master_seed: int, branch: int, grid: int, trial: int) -> int:
    ss = np.random.SeedSequence((master_seed, branch, grid, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _trial_metric(sinr: np.ndarray, domain: str) -> float:
    if domain == "linear_sinr":
        return float(np.mean(sinr))
    if domain == "db_sinr":
        return float(np.mean(10.0 * np.log10(sinr)))
    return metrics.sum_rate(sinr)


def _run_cell(args) -> ResultRow:
    spec, branch_idx, branch_e, grid_idx, value, scheme, label = args
    config = _config_at(spec.base_config, spec.sweep_axis, value)
    if branch_e is not None:
        config = replace(config, e1_sq=branch_e, e2_sq=branch_e)
    samples = []
    alpha_bc = []
    alpha_fc = []
    excluded = 0
    reason = ""
    for t in range(spec.trials):
        seed = _trial_seed(spec.master_seed, branch_idx, grid_idx, t)
        realization = generate_realization(config, seed)
        try:
            design = build_design(scheme, realization, config)
        except DesignError as err:
            excluded += 1
            reason = str(err)
            continue
        H_eff = metrics.effective_channel(design, realization, config)
        noise = metrics.noise_power(design, realization, config)
        sinr = metrics.sinr_exact(H_eff, noise)
        samples.append(_trial_metric(sinr, spec.average_domain))
        alpha_bc.append(design.alpha_bc)
        alpha_fc.append(design.alpha_fc)
    if not samples:
        return ResultRow(sweep_value=float(value), scheme=label, mean_metric=math.nan,
                         stderr_metric=math.nan, trials=0, alpha_bc_mean=math.nan,
                         alpha_fc_mean=math.nan, excluded=excluded, failed=True,
                         reason=reason or "no successful trials")
    arr = np.asarray(samples)
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return ResultRow(sweep_value=float(value), scheme=label,
                     mean_metric=float(arr.mean()), stderr_metric=stderr,
                     trials=arr.size, alpha_bc_mean=float(np.mean(alpha_bc)),
                     alpha_fc_mean=float(np.mean(alpha_fc)), excluded=excluded)


def _branch_label(scheme: str, branch_e) -> str:
    if branch_e is None:
        return scheme
    return f"{scheme}|e2={branch_e:g}"


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ResultTable:
    """Run every (branch, grid point, scheme) cell and gather the rows.

    Cells are independent and deterministically seeded, so they may run in
    any order and on any number of workers without changing the result; a
    design failure excludes that trial (counted), a fully failed cell is
    flagged and the run continues.
    """
    branches = [(i, e) for i, e in enumerate(spec.error_branches)] or [(0, None)]
    tasks = []
    for branch_idx, branch_e in branches:
        for grid_idx, value in enumerate(spec.sweep_values):
            for scheme in spec.schemes:
                label = _branch_label(scheme, branch_e)
                tasks.append((spec, branch_idx, branch_e, grid_idx, value, scheme, label))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(_run_cell, tasks))
    else:
        rows = tuple(_run_cell(task) for task in tasks)
    return ResultTable(spec=spec, rows=rows)


def _error_grid():
    return (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)


def preset(name: str) -> ExperimentSpec:
    """Experiment spec reproducing one of the reference figures at desk scale.

    Antenna/user counts are not fixed by the figure captions; every preset
    uses M = N = K = 4 (the smallest sizes allowed by both designs) and can
    be overridden downstream.  Single-relay presets use R = 1, multi-relay
    ones R = 10 except for the relay-count sweep itself.
    """
    base = SystemConfig(M=4, N=4, K=4, R=1, Ps=100.0, Pr=100.0)
    if name == "fig2":
        # robust vs conventional SINR over the backward SNR; FC fixed at 20 dB
        return ExperimentSpec(
            base_config=replace(base, e1_sq=0.2, e2_sq=0.2),
            sweep_axis="snr_bc_db", sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0),
            schemes=_ALL_SCHEMES, name="fig2")
    if name == "fig3":
        # forward SNR sweep; the RZF regularizer vanishes as it grows
        return ExperimentSpec(
            base_config=replace(base, e1_sq=0.1, e2_sq=0.1),
            sweep_axis="snr_fc_db",
            sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0),
            schemes=_ALL_SCHEMES, name="fig3")
    if name == "fig4":
        return ExperimentSpec(
            base_config=replace(base, e1_sq=0.1, e2_sq=0.1),
            sweep_axis="K", sweep_values=(2, 4, 6, 8),
            schemes=_ALL_SCHEMES, name="fig4")
    if name == "fig5":
        return ExperimentSpec(
            base_config=replace(base, R=10),
            sweep_axis="error_power", sweep_values=_error_grid(),
            schemes=_MULTI_RELAY_SCHEMES, name="fig5")
    if name == "fig6":
        # regularizer comparison; the alpha columns are the payload here
        return ExperimentSpec(
            base_config=replace(base, R=10).with_snr(bc_db=10.0),
            sweep_axis="error_power", sweep_values=_error_grid(),
            schemes=(beamformers.ROBUST_MMSE_RZF, beamformers.MMSE_RZF), name="fig6")
    if name == "fig7":
        return ExperimentSpec(
            base_config=replace(base, R=10),
            sweep_axis="R", sweep_values=(2, 4, 6, 8, 10),
            schemes=_MULTI_RELAY_SCHEMES, average_domain="sum_rate",
            error_branches=(0.0, 0.2), name="fig7")
    raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")
