"""Command line interface.

Subcommands wrap the library layers: `sample` draws noise paths,
`simulate` integrates the SDE, `estimate` writes windowed estimate
series, `sigma2` prints the limit variance, and `sweep`, `normality`,
`lemma31` drive the Monte Carlo harness.  Every run writes a
run_manifest.json (resolved config, config hash, versions, UTC
timestamp) into the output directory before any computation; all other
output files are deterministic functions of config and seed.

Exit codes: 0 success, 1 I/O failure, 2 configuration or usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .errors import BiftrendError, ConfigError, NumericalError
from .harness import (
    ExperimentConfig,
    config_digest,
    load_config,
    run_lemma31,
    run_normality,
    run_rate_sweep,
    write_result,
)
from .asymptotics import sigma2 as sigma2_value
from .bifbm import validate_params
from .estimators import estimate_series
from .kernels import kernel_from_name
from .sampling import TimeGrid, build_factor, dump_paths, sample_paths
from .sde import limit_path, simulate
from .trend import parse

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biftrend",
        description="bifractional-noise trend estimation experiments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample", help="draw bifractional noise paths")
    sample.add_argument("--H", type=float, required=True)
    sample.add_argument("--K", type=float, required=True)
    sample.add_argument("--T", type=float, default=1.0)
    sample.add_argument("--n", type=int, default=256)
    sample.add_argument("--count", type=int, default=10)
    sample.add_argument("--seed", type=int, required=True)
    sample.add_argument("--out", required=True)
    sample.add_argument("--no-figures", action="store_true")

    for name, help_text in (
        ("simulate", "integrate the SDE along sampled noise"),
        ("estimate", "write windowed estimate series per replication"),
        ("sweep", "Monte Carlo rate sweep over noise levels"),
        ("normality", "distribution check of the centered estimator"),
        ("lemma31", "deviation bounds of X around the limit path"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON experiment config")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--seed", type=int, help="override the config seed")
        cmd.add_argument("--threads", type=int, help="override worker threads")
        cmd.add_argument("--no-figures", action="store_true")
        if name in ("simulate", "estimate"):
            cmd.add_argument("--count", type=int, help="override replication count")
            cmd.add_argument("--eps", type=float, help="override the noise level")
        if name == "normality":
            cmd.add_argument("--t-star", type=float, help="evaluation time")

    sig = sub.add_parser("sigma2", help="print the limit variance")
    sig.add_argument("--H", type=float, required=True)
    sig.add_argument("--K", type=float, required=True)
    sig.add_argument("--kernel", default="uniform")
    sig.add_argument("--tol", type=float, default=1e-8)
    sig.add_argument("--alpha-term", action="store_true")
    return parser


def _read_config(args) -> ExperimentConfig:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {args.config}: {exc}") from None
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        overrides["threads"] = args.threads
    if getattr(args, "count", None) is not None:
        overrides["replications"] = args.count
    if getattr(args, "eps", None) is not None:
        overrides["eps"] = (args.eps,)
    if getattr(args, "t_star", None) is not None:
        overrides["t_star"] = args.t_star
    return load_config(doc, overrides)


def _write_manifest(outdir: str, command: str, cfg_dict: dict, cfg_hash: str, extra=None):
    os.makedirs(outdir, exist_ok=True)
    manifest = {
        "command": command,
        "config": cfg_dict,
        "config_hash": cfg_hash,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "timestamp_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(outdir, "run_manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _cmd_sample(args) -> int:
    params = validate_params(args.H, args.K)
    grid = TimeGrid(args.T, args.n)
    cfg_dict = {
        "H": args.H, "K": args.K, "T": args.T, "n": args.n,
        "count": args.count, "seed": args.seed,
    }
    import hashlib

    cfg_hash = hashlib.sha256(
        json.dumps(cfg_dict, sort_keys=True).encode()
    ).hexdigest()[:16]
    _write_manifest(args.out, "sample", cfg_dict, cfg_hash)
    factor = build_factor(params, grid)
    paths = sample_paths(factor, args.count, args.seed)
    names = dump_paths(paths, os.path.join(args.out, "paths"))
    if not args.no_figures:
        from .report import paths_figure, save_figure

        save_figure(paths_figure(paths), os.path.join(args.out, "figures", "paths.png"))
    print(f"wrote {len(names)} noise paths under {args.out} (jitter {factor.jitter:g})")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _read_config(args)
    eps = cfg.eps[0]
    _write_manifest(args.out, "simulate", asdict(cfg), config_digest(cfg))
    theta = cfg.theta()
    factor = build_factor(cfg.params(), cfg.grid(), cap=cfg.grid_cap)
    noise = sample_paths(factor, cfg.replications, cfg.seed)
    observed = [simulate(theta, cfg.x0, eps, w, cfg.scheme) for w in noise]
    limit = limit_path(theta, cfg.x0, cfg.grid())
    names = dump_paths(observed, os.path.join(args.out, "paths"), prefix="observed")
    with open(os.path.join(args.out, "paths", "limit.csv"), "w", encoding="utf-8") as fh:
        fh.write("t,value\n")
        for t, v in zip(limit.grid.points, limit.values):
            fh.write(f"{float(t)!r},{float(v)!r}\n")
    if not args.no_figures:
        from .report import paths_figure, save_figure

        save_figure(
            paths_figure(observed, limit),
            os.path.join(args.out, "figures", "paths.png"),
        )
    print(f"wrote {len(names)} observed paths (eps={eps:g}) under {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    cfg = _read_config(args)
    eps = cfg.eps[0]
    _write_manifest(args.out, "estimate", asdict(cfg), config_digest(cfg))
    theta = cfg.theta()
    kernel = cfg.kernel()
    phi = cfg.phi_for(eps)
    ts = cfg.eval_points()
    factor = build_factor(cfg.params(), cfg.grid(), cap=cfg.grid_cap)
    noise = sample_paths(factor, cfg.replications, cfg.seed)
    est_dir = os.path.join(args.out, "estimates")
    os.makedirs(est_dir, exist_ok=True)
    series_list = []
    for i, w in enumerate(noise):
        observed = simulate(theta, cfg.x0, eps, w, cfg.scheme)
        series = estimate_series(observed, kernel, phi, ts)
        series_list.append(series)
        with open(os.path.join(est_dir, f"estimate_{i:04d}.csv"), "w", encoding="utf-8") as fh:
            fh.write(f"# config_hash={config_digest(cfg)}\n# seed={cfg.seed}\n")
            series.write_csv(fh)
    if not args.no_figures:
        from .report import save_figure, series_figure
        from .trend import evaluate

        save_figure(
            series_figure(ts, series_list, np.asarray(evaluate(theta, ts))),
            os.path.join(args.out, "figures", "estimates.png"),
        )
    print(
        f"wrote {len(series_list)} estimate series (eps={eps:g}, phi={phi:.6g}) "
        f"under {args.out}"
    )
    return 0


def _cmd_sigma2(args) -> int:
    params = validate_params(args.H, args.K)
    kernel = kernel_from_name(args.kernel)
    value = sigma2_value(params, kernel, tol=args.tol, alpha_term=args.alpha_term)
    print(f"sigma2={value:.10f} (abs tol {args.tol:g}, kernel {kernel.name})")
    return 0


def _cmd_harness(args, runner, headline) -> int:
    cfg = _read_config(args)
    _write_manifest(args.out, args.command, asdict(cfg), config_digest(cfg))
    result = runner(cfg)
    write_result(result, args.out)
    if not args.no_figures:
        from .report import render_result

        render_result(result, args.out)
    print(headline(result))
    return 0


def _headline_sweep(result) -> str:
    return (
        f"fitted_slope={result.slope:.4f} stderr={result.slope_stderr:.4f} "
        f"theoretical={result.theoretical_exponent:.4f}"
    )


def _headline_normality(result) -> str:
    ns = result.normality
    return (
        f"AD={ns.ad_stat:.4f} p={ns.ad_pvalue:.4g} KS_p={ns.ks_pvalue:.4g} "
        f"var_ratio={ns.var_ratio:.4f} sigma2={ns.sigma2:.6f}"
    )


def _headline_lemma(result) -> str:
    lr = result.lemma31
    return (
        f"violations={lr.violation_count}/{lr.n_paths} "
        f"sup_mse={lr.sup_mse:.6g} bound={lr.mse_bound:.6g} "
        f"max_excess={lr.max_excess:.6g}"
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "sample":
            return _cmd_sample(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "sigma2":
            return _cmd_sigma2(args)
        if args.command == "sweep":
            return _cmd_harness(args, run_rate_sweep, _headline_sweep)
        if args.command == "normality":
            return _cmd_harness(args, run_normality, _headline_normality)
        if args.command == "lemma31":
            return _cmd_harness(args, run_lemma31, _headline_lemma)
        parser.error(f"unknown command {args.command!r}")
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except BiftrendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
