"""Command-line front end: single runs, Monte Carlo sweeps, and self checks.

Configuration is a flat INI file with five sections (system, channel,
exposure, alternating, sweep).  Every key can also be set through an
environment variable RISEE_<SECTION>_<KEY>, and a few common knobs have
flags; precedence is defaults < file < environment < flags.

Exit codes: 0 success, 2 configuration error, 3 precondition violation,
4 property failure from the validate command.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import algorithms, channel, experiments, model, validate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_PROPERTY = 4

ENV_PREFIX = "RISEE_"

DEFAULTS: Dict[str, Dict[str, str]] = {
    "system": {
        "bandwidth_hz": "5e6",
        "path_loss_db": "110",
        "noise_psd_dbm_per_hz": "-174",
        "amp_inefficiency": "1.0",
        "static_power_w": "30",
        "max_tx_power_w": "20",
        "tx_exposure_budget": "0.2125",
        "rx_exposure_budget": "0.2125",
    },
    "channel": {
        "n_ris": "100",
        "n_tx": "4",
        "n_rx": "4",
        "los_mean_h": "2.0",
        "los_mean_g": "2.0",
        "nlos_variance": "1.0",
    },
    "exposure": {
        "tx_coeffs": "0.25",
        "rx_coeffs": "0.25",
    },
    "alternating": {
        "rel_tol": "1e-8",
        "max_iters": "500",
        "init": "uniform_feasible",
    },
    "sweep": {
        "axis": "ris_elements",
        "axis_values": "20,40,60,80,100",
        "fixed_value": "0.85",
        "schemes": "a,b,c,d,e,f",
        "trials": "100",
        "master_seed": "1",
    },
}


class ConfigError(ValueError):
    """Invalid configuration file, environment override, or flag value."""


def _find_line(text: str, section: str, key: str) -> Optional[int]:
    in_section = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            in_section = stripped[1:-1].strip() == section
        elif in_section and re.match(rf"^{re.escape(key)}\s*[=:]", stripped):
            return lineno
    return None


def load_config(path: Optional[str], env: Optional[Dict[str, str]] = None) -> Dict[str, Dict[str, str]]:
    """Merge defaults, an optional INI file, and environment overrides."""
    import configparser

    cfg = {sec: dict(keys) for sec, keys in DEFAULTS.items()}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
            parser.read_string(text, source=path)
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        for section in parser.sections():
            if section not in cfg:
                raise ConfigError(f"{path}: unknown section [{section}]")
            for key, value in parser.items(section):
                if key not in cfg[section]:
                    line = _find_line(text, section, key)
                    where = f"{path}:{line}" if line else path
                    raise ConfigError(f"{where}: unknown key {key!r} in section [{section}]")
                cfg[section][key] = value
    env = os.environ if env is None else env
    for name, value in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):]
        for section in cfg:
            prefix = section.upper() + "_"
            if rest.startswith(prefix):
                key = rest[len(prefix):].lower()
                if key not in cfg[section]:
                    raise ConfigError(f"environment {name}: unknown key {key!r} in [{section}]")
                cfg[section][key] = value
                break
        else:
            raise ConfigError(f"environment {name}: unknown section")
    return cfg


def _parse_float(cfg, section: str, key: str) -> float:
    raw = cfg[section][key]
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: not a number") from exc


def _parse_int(cfg, section: str, key: str) -> int:
    raw = cfg[section][key]
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: not an integer") from exc


def _parse_float_list(cfg, section: str, key: str) -> List[float]:
    raw = cfg[section][key]
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: not a comma-separated number list") from exc


def build_params(cfg) -> model.SystemParams:
    try:
        return model.SystemParams(
            bandwidth_hz=_parse_float(cfg, "system", "bandwidth_hz"),
            path_loss_db=_parse_float(cfg, "system", "path_loss_db"),
            noise_psd_dbm_per_hz=_parse_float(cfg, "system", "noise_psd_dbm_per_hz"),
            amp_inefficiency=_parse_float(cfg, "system", "amp_inefficiency"),
            static_power_w=_parse_float(cfg, "system", "static_power_w"),
            max_tx_power_w=_parse_float(cfg, "system", "max_tx_power_w"),
            tx_exposure_budget=_parse_float(cfg, "system", "tx_exposure_budget"),
            rx_exposure_budget=_parse_float(cfg, "system", "rx_exposure_budget"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[system]: {exc}") from exc


def build_channel_model(cfg) -> channel.ChannelModel:
    try:
        return channel.ChannelModel(
            rician_mean_h=complex(_parse_float(cfg, "channel", "los_mean_h")),
            rician_mean_g=complex(_parse_float(cfg, "channel", "los_mean_g")),
            scatter_variance=_parse_float(cfg, "channel", "nlos_variance"),
            dims=(
                _parse_int(cfg, "channel", "n_ris"),
                _parse_int(cfg, "channel", "n_tx"),
                _parse_int(cfg, "channel", "n_rx"),
            ),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[channel]: {exc}") from exc


def build_coeffs(cfg, n_tx: int, n_rx: int) -> model.ExposureCoefficients:
    tx = _parse_float_list(cfg, "exposure", "tx_coeffs")
    rx = _parse_float_list(cfg, "exposure", "rx_coeffs")
    if len(tx) == 1:
        tx = tx * n_tx
    if len(rx) == 1:
        rx = rx * n_rx
    if len(tx) != n_tx or len(rx) != n_rx:
        raise ConfigError(
            f"[exposure]: coefficient list lengths ({len(tx)}, {len(rx)}) do not match "
            f"antenna counts ({n_tx}, {n_rx})"
        )
    try:
        return model.ExposureCoefficients(np.array(tx), np.array(rx))
    except ValueError as exc:
        raise ConfigError(f"[exposure]: {exc}") from exc


def build_opts(cfg) -> algorithms.AlternatingOptions:
    init = cfg["alternating"]["init"].strip()
    seed = None
    if ":" in init:
        init, _, seed_txt = init.partition(":")
        try:
            seed = int(seed_txt, 0)
        except ValueError as exc:
            raise ConfigError(f"[alternating] init: bad seed {seed_txt!r}") from exc
    try:
        return algorithms.AlternatingOptions(
            rel_tol=_parse_float(cfg, "alternating", "rel_tol"),
            max_iters=_parse_int(cfg, "alternating", "max_iters"),
            init=init,
            init_seed=seed,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[alternating]: {exc}") from exc


def build_sweep_spec(cfg, params: model.SystemParams) -> experiments.SweepSpec:
    schemes = tuple(s.strip() for s in cfg["sweep"]["schemes"].split(",") if s.strip())
    tx = _parse_float_list(cfg, "exposure", "tx_coeffs")
    rx = _parse_float_list(cfg, "exposure", "rx_coeffs")
    if len(tx) != 1 or len(rx) != 1:
        raise ConfigError("[exposure]: sweeps need scalar (isotropic) exposure coefficients")
    try:
        return experiments.SweepSpec(
            axis=cfg["sweep"]["axis"].strip(),
            axis_values=tuple(_parse_float_list(cfg, "sweep", "axis_values")),
            fixed_value=_parse_float(cfg, "sweep", "fixed_value"),
            schemes=schemes,
            trials=_parse_int(cfg, "sweep", "trials"),
            master_seed=_parse_int(cfg, "sweep", "master_seed"),
            params=params,
            n_tx=_parse_int(cfg, "channel", "n_tx"),
            n_rx=_parse_int(cfg, "channel", "n_rx"),
            coeff_c=tx[0],
            coeff_d=rx[0],
            los_mean_h=complex(_parse_float(cfg, "channel", "los_mean_h")),
            los_mean_g=complex(_parse_float(cfg, "channel", "los_mean_g")),
            nlos_variance=_parse_float(cfg, "channel", "nlos_variance"),
            opts=build_opts(cfg),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[sweep]: {exc}") from exc


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    params = build_params(cfg)
    cmodel = build_channel_model(cfg)
    if args.load_channel:
        try:
            pair, seed = channel.load_channel(args.load_channel)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"--load-channel: {exc}") from exc
    else:
        seed = args.seed if args.seed is not None else 0
        pair = channel.sample(cmodel, seed)
    coeffs = build_coeffs(cfg, pair.n_tx, pair.n_rx)
    opts = build_opts(cfg)
    if args.dump_channel:
        channel.dump_channel(args.dump_channel, pair, seed)
    run = algorithms.run_scheme(
        args.scheme, params, pair, coeffs, opts,
        phase_seed=channel.derive_seed(seed, 1),
    )
    feas = model.is_feasible(params, coeffs, run.config)
    summary = {
        "scheme": run.scheme,
        "seed": int(seed),
        "n_ris": pair.n_ris,
        "n_tx": pair.n_tx,
        "n_rx": pair.n_rx,
        "ee_bits_per_joule": run.result.ee_bits_per_joule,
        "rate_bps": run.result.rate_bps,
        "tx_power_w": run.config.tx_power_w,
        "tx_exposure": run.result.tx_exposure,
        "rx_exposure": run.result.rx_exposure,
        "iterations": run.iterations,
        "converged": run.converged,
        "feasible": feas.ok,
        "violated": [name for name, _ in feas.violations],
    }
    print(f"scheme {run.scheme}: {algorithms.SCHEME_DESCRIPTIONS[run.scheme]}")
    print(f"  energy efficiency : {run.result.ee_bits_per_joule:.6e} bit/J")
    print(f"  rate              : {run.result.rate_bps:.6e} bit/s")
    print(f"  tx power          : {run.config.tx_power_w:.6f} W")
    print(f"  tx exposure       : {run.result.tx_exposure:.6f} (budget {params.tx_exposure_budget})")
    print(f"  rx exposure       : {run.result.rx_exposure:.6f} (budget {params.rx_exposure_budget})")
    print(f"  iterations        : {run.iterations} (converged: {run.converged})")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.trials is not None:
        cfg["sweep"]["trials"] = str(args.trials)
    if args.seed is not None:
        cfg["sweep"]["master_seed"] = str(args.seed)
    params = build_params(cfg)
    spec = build_sweep_spec(cfg, params)
    threads = args.threads if args.threads else 1
    table = experiments.run_sweep(spec, threads=threads, progress=print)
    if args.out:
        experiments.write_csv(table.records, args.out + ".trials.csv")
        experiments.write_csv(table, args.out + ".agg.csv")
        print(f"wrote {args.out}.trials.csv and {args.out}.agg.csv")
    print(f"{'scheme':<7}{'axis_value':>12}{'trials':>8}{'mean_ee_bpj':>16}{'mean_tx_exp':>14}")
    for row in table.rows:
        print(
            f"{row.scheme:<7}{row.axis_value:>12.4g}{row.trials:>8}"
            f"{row.mean_ee_bpj:>16.6e}{row.mean_tx_exposure:>14.6f}"
        )
    if table.skipped:
        print(f"warning: {len(table.skipped)} trial cells skipped after solver errors")
        for sk in table.skipped[:5]:
            print(f"  scheme {sk.scheme} axis {sk.axis_value} trial {sk.trial}: {sk.error}")
    return EXIT_OK


def cmd_validate(args) -> int:
    count = args.count if args.count is not None else 25
    seed = args.seed if args.seed is not None else 0
    ok = validate.run_all(count, seed)
    return EXIT_OK if ok else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risee",
        description="Energy-efficiency optimization of an RIS-assisted link "
        "under exposure constraints",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="INI configuration file")
        p.add_argument("--seed", type=lambda s: int(s, 0), metavar="U64", help="seed override")
        p.add_argument("--threads", type=int, metavar="U16", default=0,
                       help="worker threads (0 = single-threaded)")
        p.add_argument("--out", metavar="PATH", help="output path (JSON for run, CSV prefix for sweep)")

    p_run = sub.add_parser("run", help="solve a single channel draw")
    common(p_run)
    p_run.add_argument("--scheme", choices=list(algorithms.SCHEMES), default="a")
    p_run.add_argument("--dump-channel", metavar="PATH", help="write the channel draw to a file")
    p_run.add_argument("--load-channel", metavar="PATH", help="replay a dumped channel file")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="Monte Carlo sweep with CSV output")
    common(p_sweep)
    p_sweep.add_argument("--trials", type=int, metavar="U32", help="trials per axis value")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run solver self-checks")
    common(p_val)
    p_val.add_argument("--count", type=int, metavar="N", help="instances per property (default 25)")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except model.PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except model.DimensionError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
