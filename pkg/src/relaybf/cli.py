"""Command-line front end: presets, custom sweeps, validation, CSV/JSON output."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .beamformers import SCHEMES
from .harness import (AVERAGE_DOMAINS, SWEEP_AXES, ExperimentSpec, ResultTable,
                      preset, run_experiment)
from .model import ConfigError, SystemConfig, config_from_mapping

__all__ = ["main", "write_csv", "write_json"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_UNKNOWN_NAME = 2
EXIT_BAD_CONFIG = 3
EXIT_UNWRITABLE = 4

CSV_HEADER = "sweep_value,scheme,mean_metric,stderr_metric,trials,alpha_bc_mean,alpha_fc_mean"

_SYSTEM_KEYS = ("M", "N", "K", "R", "Ps", "Pr", "sigma1_sq", "sigma2_sq",
                "e1_sq", "e2_sq", "snr_bc_db", "snr_fc_db")
_EXPERIMENT_KEYS = ("sweep_axis", "sweep_values", "schemes", "trials", "seed",
                    "average_domain")


def _fmt(x: float) -> str:
    """Text form of a numeric cell; round-trips through float() exactly."""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def write_csv(table: ResultTable, stream) -> None:
    stream.write(CSV_HEADER + "\n")
    for row in table.rows:
        cells = (_fmt(row.sweep_value), row.scheme, _fmt(row.mean_metric),
                 _fmt(row.stderr_metric), str(row.trials),
                 _fmt(row.alpha_bc_mean), _fmt(row.alpha_fc_mean))
        stream.write(",".join(cells) + "\n")


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return _fmt(x)
    return x


def write_json(table: ResultTable, stream) -> None:
    spec = table.spec
    cfg = spec.base_config
    metadata = {
        "version": __version__,
        "name": spec.name,
        "sweep_axis": spec.sweep_axis,
        "sweep_values": list(spec.sweep_values),
        "schemes": list(spec.schemes),
        "trials": spec.trials,
        "master_seed": spec.master_seed,
        "average_domain": spec.average_domain,
        "error_branches": list(spec.error_branches),
        "config": {
            "M": cfg.M, "N": cfg.N, "K": cfg.K, "R": cfg.R,
            "Ps": cfg.Ps, "Pr": cfg.Pr,
            "sigma1_sq": cfg.sigma1_sq, "sigma2_sq": cfg.sigma2_sq,
            "e1_sq": cfg.e1_sq, "e2_sq": cfg.e2_sq,
            "snr_bc_db": cfg.snr_bc_db, "snr_fc_db": cfg.snr_fc_db,
        },
        "exclusions": {f"{r.scheme}@{_fmt(r.sweep_value)}": r.excluded
                       for r in table.rows if r.excluded},
        "failures": [{"scheme": r.scheme, "sweep_value": r.sweep_value, "reason": r.reason}
                     for r in table.rows if r.failed],
    }
    rows = [{
        "sweep_value": r.sweep_value,
        "scheme": r.scheme,
        "mean_metric": _json_safe(r.mean_metric),
        "stderr_metric": _json_safe(r.stderr_metric),
        "trials": r.trials,
        "alpha_bc_mean": _json_safe(r.alpha_bc_mean),
        "alpha_fc_mean": _json_safe(r.alpha_fc_mean),
    } for r in table.rows]
    json.dump({"metadata": metadata, "rows": rows}, stream, indent=2, sort_keys=True)
    stream.write("\n")


def parse_config_file(path) -> dict:
    """Read a flat `key = value` text file; '#' starts a comment."""
    mapping = {}
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{path}:{lineno}: empty key or value")
        mapping[key] = value
    return mapping


def _apply_overrides(mapping: dict, pairs) -> dict:
    out = dict(mapping)
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        key = key.strip()
        if key not in _SYSTEM_KEYS and key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"unknown override key {key!r}")
        out[key] = value.strip()
    return out


def _split_list(text: str):
    return [item.strip() for item in str(text).split(",") if item.strip()]


def _spec_from_mapping(mapping: dict) -> ExperimentSpec:
    system = {k: v for k, v in mapping.items() if k in _SYSTEM_KEYS}
    config = config_from_mapping(system)
    if "sweep_axis" not in mapping or "sweep_values" not in mapping:
        raise ConfigError("a custom run needs sweep_axis and sweep_values")
    axis = str(mapping["sweep_axis"])
    cast = int if axis in ("K", "R") else float
    values = tuple(cast(v) for v in _split_list(mapping["sweep_values"]))
    schemes = tuple(_split_list(mapping["schemes"])) if "schemes" in mapping else SCHEMES
    return ExperimentSpec(
        base_config=config,
        sweep_axis=axis,
        sweep_values=values,
        schemes=schemes,
        trials=int(mapping.get("trials", 1000)),
        master_seed=int(mapping.get("seed", 1234)),
        average_domain=str(mapping.get("average_domain", "linear_sinr")),
        name="custom",
    )


def _override_preset(spec: ExperimentSpec, mapping: dict) -> ExperimentSpec:
    """Apply --set / config-file keys on top of a preset."""
    cfg = spec.base_config
    sys_updates = {}
    for key in ("M", "N", "K", "R"):
        if key in mapping:
            sys_updates[key] = int(mapping[key])
    for key in ("Ps", "Pr", "sigma1_sq", "sigma2_sq", "e1_sq", "e2_sq"):
        if key in mapping:
            sys_updates[key] = float(mapping[key])
    if sys_updates:
        cfg = replace(cfg, **sys_updates)
    if "snr_bc_db" in mapping:
        cfg = cfg.with_snr(bc_db=float(mapping["snr_bc_db"]))
    if "snr_fc_db" in mapping:
        cfg = cfg.with_snr(fc_db=float(mapping["snr_fc_db"]))
    spec_updates = {"base_config": cfg}
    if "sweep_values" in mapping:
        cast = int if spec.sweep_axis in ("K", "R") else float
        spec_updates["sweep_values"] = tuple(cast(v) for v in _split_list(mapping["sweep_values"]))
    if "schemes" in mapping:
        spec_updates["schemes"] = tuple(_split_list(mapping["schemes"]))
    if "trials" in mapping:
        spec_updates["trials"] = int(mapping["trials"])
    if "seed" in mapping:
        spec_updates["master_seed"] = int(mapping["seed"])
    if "average_domain" in mapping:
        spec_updates["average_domain"] = str(mapping["average_domain"])
    return replace(spec, **spec_updates)


def _add_run_flags(parser):
    parser.add_argument("--trials", type=int, help="realizations per grid point")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output file path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config or experiment key (repeatable)")
    parser.add_argument("--schemes", help="comma-separated scheme subset")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel worker processes")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaybf",
        description="Monte Carlo SINR/sum-rate sweeps for two-hop MIMO relay beamforming")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a custom sweep from a config file")
    p_run.add_argument("--config", help="flat key=value config file")
    _add_run_flags(p_run)

    p_preset = sub.add_parser("preset", help="run a figure preset")
    p_preset.add_argument("name", help="fig2 .. fig7")
    _add_run_flags(p_preset)

    p_report = sub.add_parser(
        "report", help="run a figure preset and render the figure next to the table")
    p_report.add_argument("name", help="fig2 .. fig7")
    _add_run_flags(p_report)

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("--config", required=True)

    sub.add_parser("list-schemes", help="print the known scheme names")
    return parser


def _flag_overrides(args) -> list:
    pairs = list(args.set or ())
    if args.trials is not None:
        pairs.append(f"trials={args.trials}")
    if args.seed is not None:
        pairs.append(f"seed={args.seed}")
    if args.schemes is not None:
        pairs.append(f"schemes={args.schemes}")
    return pairs


def _write_output(table: ResultTable, args) -> Path | None:
    writer = write_csv if args.format == "csv" else write_json
    if args.out:
        path = Path(args.out)
        try:
            with open(path, "w", newline="") as handle:
                writer(table, handle)
        except OSError as err:
            raise PermissionError(f"cannot write output {path}: {err}") from err
        return path
    writer(table, sys.stdout)
    return None


def _execute_sweep(spec: ExperimentSpec, args) -> int:
    start = time.perf_counter()
    table = run_experiment(spec, workers=max(1, args.workers))
    out = _write_output(table, args)
    wall = time.perf_counter() - start
    branches = max(1, len(spec.error_branches))
    grid = len(spec.sweep_values) * len(spec.schemes) * branches
    failed = sum(1 for r in table.rows if r.failed)
    excluded = sum(r.excluded for r in table.rows)
    note = f" failed_rows={failed} excluded_trials={excluded}" if failed or excluded else ""
    print(f"grid={grid} trials={spec.trials} wall={wall:.1f}s"
          f" -> {out if out else 'stdout'}{note}", file=sys.stderr)
    for row in table.rows:
        if row.failed:
            print(f"row failed: {row.scheme} @ {row.sweep_value:g}: {row.reason}",
                  file=sys.stderr)
    if args.command == "report":
        from . import report
        if out is None:
            raise ConfigError("report needs --out to place the figure")
        report.render_metric_figure(table, out.with_suffix(".png"))
        if spec.name == "fig6":
            report.render_alpha_figure(table, out.with_name(out.stem + "_alpha.png"))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-schemes":
            for scheme in SCHEMES:
                print(scheme)
            return EXIT_OK

        if args.command == "validate":
            mapping = parse_config_file(args.config)
            system = {k: v for k, v in mapping.items() if k in _SYSTEM_KEYS}
            unknown = set(mapping) - set(_SYSTEM_KEYS) - set(_EXPERIMENT_KEYS)
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            config = config_from_mapping(system)
            print(f"config ok: M={config.M} N={config.N} K={config.K} R={config.R} "
                  f"snr_bc={config.snr_bc_db:.1f}dB snr_fc={config.snr_fc_db:.1f}dB")
            return EXIT_OK

        if args.command in ("preset", "report"):
            from .harness import PRESET_NAMES
            if args.name not in PRESET_NAMES:
                print(f"unknown preset {args.name!r}; known: {', '.join(PRESET_NAMES)}",
                      file=sys.stderr)
                return EXIT_UNKNOWN_NAME
            spec = preset(args.name)
            mapping = _apply_overrides({}, _flag_overrides(args))
            spec = _override_preset(spec, mapping)
            return _execute_sweep(spec, args)

        # custom run
        mapping = parse_config_file(args.config) if args.config else {}
        mapping = _apply_overrides(mapping, _flag_overrides(args))
        spec = _spec_from_mapping(mapping)
        return _execute_sweep(spec, args)

    except ConfigError as err:
        msg = str(err)
        print(f"error: {msg}", file=sys.stderr)
        if "unknown scheme" in msg or "unknown preset" in msg:
            return EXIT_UNKNOWN_NAME
        return EXIT_BAD_CONFIG
    except PermissionError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_UNWRITABLE
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
