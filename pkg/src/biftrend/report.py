"""Render experiment results to PNG figures next to the delimited output."""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy import stats as sps

from .harness import ExperimentResult
from .sampling import SamplePath

__all__ = [
    "rate_sweep_figure",
    "normality_figure",
    "lemma31_figure",
    "paths_figure",
    "series_figure",
    "save_figure",
    "render_result",
]

_MAX_PATHS_DRAWN = 20


def rate_sweep_figure(result: ExperimentResult) -> plt.Figure:
    stats = result.eps_stats
    eps = np.array([s.eps for s in stats])
    mse = np.array([s.sup_mse for s in stats])
    se = np.array([s.mc_se for s in stats])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.errorbar(eps, mse, yerr=3 * se, fmt="o", capsize=3, label="sup MSE (3 SE)")
    anchor = mse[0] * (eps / eps[0]) ** result.theoretical_exponent
    ax.plot(eps, anchor, "--", color="gray",
            label=f"theoretical slope {result.theoretical_exponent:.3f}")
    fit = mse[0] * (eps / eps[0]) ** result.slope
    ax.plot(eps, fit, "-", alpha=0.7,
            label=f"fitted slope {result.slope:.3f} (se {result.slope_stderr:.3f})")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"noise level $\varepsilon$")
    ax.set_ylabel("sup MSE over evaluation window")
    ax.set_title(f"{result.config.variant} estimator rate sweep")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def normality_figure(result: ExperimentResult) -> plt.Figure:
    ns = result.normality
    scale = math.sqrt(ns.sigma2)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ax1.hist(ns.z, bins=40, density=True, alpha=0.6, label="centered estimates")
    grid = np.linspace(min(ns.z.min(), -4 * scale), max(ns.z.max(), 4 * scale), 400)
    ax1.plot(grid, sps.norm.pdf(grid, scale=scale), "k-",
             label=f"N(0, {ns.sigma2:.4f})")
    ax1.set_xlabel("z")
    ax1.set_title(
        f"AD = {ns.ad_stat:.3f} (p = {ns.ad_pvalue:.3g}), var ratio {ns.var_ratio:.3f}"
    )
    ax1.legend(fontsize=8)
    theo = sps.norm.ppf((np.arange(1, ns.z.size + 1) - 0.5) / ns.z.size, scale=scale)
    ax2.plot(theo, np.sort(ns.z), ".", ms=2)
    lims = [min(theo[0], ns.z.min()), max(theo[-1], ns.z.max())]
    ax2.plot(lims, lims, "k--", lw=0.8)
    ax2.set_xlabel("normal quantiles")
    ax2.set_ylabel("sample quantiles")
    ax2.set_title(f"t* = {ns.t_star:.3g}, eps = {ns.eps:g}")
    fig.tight_layout()
    return fig


def lemma31_figure(result: ExperimentResult) -> plt.Figure:
    lr = result.lemma31
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(result.eval_points, lr.mse_by_t, label=r"$E(X_t - x_t)^2$")
    ax.axhline(lr.mse_bound, color="crimson", ls="--",
               label=f"bound {lr.mse_bound:.4g}")
    ax.set_xlabel("t")
    ax.set_ylabel("mean squared deviation")
    ax.set_title(
        f"eps = {lr.eps:g}, L = {lr.L:.4g}, violations {lr.violation_count}/{lr.n_paths}"
    )
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def paths_figure(paths: list[SamplePath], limit: SamplePath | None = None) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for path in paths[:_MAX_PATHS_DRAWN]:
        ax.plot(path.grid.points, path.values, lw=0.7, alpha=0.7)
    if limit is not None:
        ax.plot(limit.grid.points, limit.values, "k-", lw=2.0, label="limit path")
        ax.legend(fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    ax.set_title(f"{min(len(paths), _MAX_PATHS_DRAWN)} of {len(paths)} paths")
    fig.tight_layout()
    return fig


def series_figure(ts, series_list, true_theta=None) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for series in series_list[:_MAX_PATHS_DRAWN]:
        ax.plot(series.t, series.theta_hat, lw=0.7, alpha=0.7)
    if true_theta is not None:
        ax.plot(ts, true_theta, "k-", lw=2.0, label=r"$\theta(t)$")
        ax.legend(fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\hat\theta(t)$")
    ax.set_title("windowed trend estimates")
    fig.tight_layout()
    return fig


def save_figure(fig: plt.Figure, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_result(result: ExperimentResult, outdir: str) -> list[str]:
    """Write the standard figure set for a harness result; returns names."""
    figdir = os.path.join(outdir, "figures")
    written = []
    if result.kind == "rate_sweep":
        save_figure(rate_sweep_figure(result), os.path.join(figdir, "rate_sweep.png"))
        written.append("figures/rate_sweep.png")
    elif result.kind == "normality":
        save_figure(normality_figure(result), os.path.join(figdir, "normality.png"))
        written.append("figures/normality.png")
    elif result.kind == "lemma31":
        save_figure(lemma31_figure(result), os.path.join(figdir, "lemma31.png"))
        written.append("figures/lemma31.png")
    return written
