"""Monte Carlo simulator for robust two-hop MIMO relay beamforming under imperfect CSI."""

__version__ = "0.1.0"

from .beamformers import (BeamformerDesign, DesignError, SCHEMES, alpha_mmse_opt,
                          alpha_rzf_opt, alpha_svd_rzf, alpha_svd_rzf_largeK,
                          build_design, design_baseline, design_mmse_rzf_robust,
                          design_svd_rzf)
from .harness import ExperimentSpec, ResultRow, ResultTable, preset, run_experiment
from .metrics import (EigExpectations, SinrReport, effective_channel, expectations,
                      noise_power, sinr_analytic_single, sinr_asymptotic, sinr_exact,
                      sinr_report, sum_rate)
from .model import (ChannelRealization, ConfigError, SystemConfig,
                    config_from_mapping, generate_realization, true_channels)

__all__ = [
    "__version__",
    "BeamformerDesign", "DesignError", "SCHEMES",
    "alpha_mmse_opt", "alpha_rzf_opt", "alpha_svd_rzf", "alpha_svd_rzf_largeK",
    "build_design", "design_baseline", "design_mmse_rzf_robust", "design_svd_rzf",
    "ExperimentSpec", "ResultRow", "ResultTable", "preset", "run_experiment",
    "EigExpectations", "SinrReport", "effective_channel", "expectations",
    "noise_power", "sinr_analytic_single", "sinr_asymptotic", "sinr_exact",
    "sinr_report", "sum_rate",
    "ChannelRealization", "ConfigError", "SystemConfig",
    "config_from_mapping", "generate_realization", "true_channels",
]
