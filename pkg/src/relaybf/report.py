"""Render experiment results as figures next to the delimited output."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import ResultTable

__all__ = ["render_metric_figure", "render_alpha_figure"]

_AXIS_LABELS = {
    "snr_bc_db": "SNR of BC (dB)",
    "snr_fc_db": "SNR of FC (dB)",
    "K": "number of users K",
    "error_power": "channel estimation error power $e_1^2 = e_2^2$",
    "R": "number of relays R",
}

_MARKERS = ("o", "s", "^", "v", "d", "x", "*", "+")


def _series(table: ResultTable):
    """Group rows by scheme label, preserving first-seen order."""
    order = []
    grouped = {}
    for row in table.rows:
        if row.failed:
            continue
        if row.scheme not in grouped:
            grouped[row.scheme] = []
            order.append(row.scheme)
        grouped[row.scheme].append(row)
    return [(label, grouped[label]) for label in order]


def _to_db(mean: float, stderr: float):
    if mean <= 0 or not math.isfinite(mean):
        return math.nan, 0.0
    # delta method for the error bar of 10*log10(mean)
    return 10.0 * math.log10(mean), 10.0 / math.log(10.0) * stderr / mean


def render_metric_figure(table: ResultTable, path) -> Path:
    """Plot mean metric vs sweep value, one curve per scheme, and save PNG.

    Linear-SINR results are shown in dB; dB and sum-rate domains are shown
    as stored.
    """
    path = Path(path)
    domain = table.spec.average_domain
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    for i, (label, rows) in enumerate(_series(table)):
        x = [r.sweep_value for r in rows]
        if domain == "linear_sinr":
            pairs = [_to_db(r.mean_metric, r.stderr_metric) for r in rows]
            y = [p[0] for p in pairs]
            yerr = [p[1] for p in pairs]
        else:
            y = [r.mean_metric for r in rows]
            yerr = [r.stderr_metric for r in rows]
        ax.errorbar(x, y, yerr=yerr, marker=_MARKERS[i % len(_MARKERS)],
                    capsize=3, label=label)
    ax.set_xlabel(_AXIS_LABELS.get(table.spec.sweep_axis, table.spec.sweep_axis))
    if domain == "sum_rate":
        ax.set_ylabel("sum rate (bits/s/Hz)")
    else:
        ax.set_ylabel("mean SINR (dB)")
    if table.spec.name:
        ax.set_title(table.spec.name)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_alpha_figure(table: ResultTable, path) -> Path:
    """Plot the mean regularization factors actually used per scheme."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    for i, (label, rows) in enumerate(_series(table)):
        x = [r.sweep_value for r in rows]
        marker = _MARKERS[i % len(_MARKERS)]
        ax.plot(x, [r.alpha_bc_mean for r in rows], marker=marker, linestyle="-",
                label=f"{label} (receive)")
        ax.plot(x, [r.alpha_fc_mean for r in rows], marker=marker, linestyle="--",
                label=f"{label} (transmit)")
    ax.set_xlabel(_AXIS_LABELS.get(table.spec.sweep_axis, table.spec.sweep_axis))
    ax.set_ylabel("mean regularization factor")
    if table.spec.name:
        ax.set_title(f"{table.spec.name}: regularization factors")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
