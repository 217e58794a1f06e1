"""Monte Carlo experiments: rate sweeps, normality checks, envelope checks.

An ExperimentConfig is a frozen, fully resolved description of one
experiment; its SHA-256 hash stamps every result file.  Replication r of
noise level eps[e] always draws from the stream spawn(seed, (e, r))
(spawn(seed, (r,)) when noise is coupled across levels), and replications
are processed in fixed-size chunks of 64, so results are bitwise
independent of thread count and chunk scheduling.

Result files are deterministic by construction: they contain the config
hash, the seed, and numbers derived from them, never timestamps or wall
times.  Wall-clock metadata lives in the run manifest written by the CLI.
"""

from __future__ import annotations

import json
import hashlib
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate
from scipy import stats as sps

from .asymptotics import (
    alt_rate_exponent,
    bias_constant,
    center_exponent,
    rate_exponent,
    sigma2,
)
from .bifbm import BifBmParams, validate_params
from .errors import ConfigError, DomainError
from .estimators import (
    alt_bandwidth,
    auxiliary_matrix,
    bandwidth,
    weights_for_points,
)
from .kernels import Kernel, kernel_from_name
from .sampling import CovFactor, TimeGrid, build_factor, sample_matrix
from .sde import Lemma31Report, lemma31_check, limit_path, simulate_matrix
from .stats import anderson_darling
from .trend import TrendExpr, parse, sup_bound

__all__ = [
    "ExperimentConfig",
    "load_config",
    "config_digest",
    "EpsStat",
    "NormalityStats",
    "ExperimentResult",
    "fit_loglog_slope",
    "run_rate_sweep",
    "run_normality",
    "run_lemma31",
    "write_result",
]

CHUNK = 64

VARIANTS = ("main", "alternate")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description; immutable and hashable to JSON."""

    theta_text: str
    x0: float
    H: float
    K: float
    T: float
    n: int
    eps: tuple[float, ...]
    replications: int
    seed: int
    kernel_name: str = "uniform"
    variant: str = "main"
    k: int | None = 0
    rho: float | None = None
    eval_window: tuple[float, float] | None = None
    eval_count: int = 21
    t_star: float | None = None
    coupled: bool = False
    scheme: str = "integrating_factor"
    L: float | None = None
    threads: int = 1
    grid_cap: int = 8192

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if self.eval_window is not None:
            object.__setattr__(
                self, "eval_window", tuple(float(v) for v in self.eval_window)
            )
        try:
            validate_params(self.H, self.K)
        except DomainError as exc:
            raise ConfigError(str(exc), "/model") from None
        try:
            parse(self.theta_text)
        except Exception as exc:
            raise ConfigError(f"bad trend expression: {exc}", "/model/theta") from None
        if not (isinstance(self.x0, (int, float)) and math.isfinite(self.x0)):
            raise ConfigError(f"x0 must be finite, got {self.x0!r}", "/model/x0")
        if not (isinstance(self.T, (int, float)) and self.T > 0 and math.isfinite(self.T)):
            raise ConfigError(f"T must be finite and > 0, got {self.T!r}", "/grid/T")
        if not (isinstance(self.n, int) and 1 <= self.n):
            raise ConfigError(f"n must be a positive integer, got {self.n!r}", "/grid/n")
        if self.n > self.grid_cap:
            raise ConfigError(
                f"n = {self.n} exceeds the grid cap {self.grid_cap}", "/grid/n"
            )
        if not self.eps:
            raise ConfigError("eps must be a non-empty list", "/experiment/eps")
        for e in self.eps:
            if not (0.0 < e < 1.0):
                raise ConfigError(f"every eps must lie in (0, 1), got {e}", "/experiment/eps")
        if any(b >= a for a, b in zip(self.eps, self.eps[1:])):
            raise ConfigError("eps must be strictly decreasing", "/experiment/eps")
        if not (isinstance(self.replications, int) and self.replications >= 1):
            raise ConfigError(
                f"replications must be a positive integer, got {self.replications!r}",
                "/experiment/replications",
            )
        if self.variant not in VARIANTS:
            raise ConfigError(
                f"variant must be one of {VARIANTS}, got {self.variant!r}",
                "/experiment/variant",
            )
        try:
            kern = kernel_from_name(self.kernel_name)
        except DomainError as exc:
            raise ConfigError(str(exc), "/experiment/kernel") from None
        if self.variant == "main":
            if not (isinstance(self.k, int) and self.k >= 0):
                raise ConfigError(
                    f"main variant requires integer k >= 0, got {self.k!r}",
                    "/experiment/k",
                )
            if kern.order < self.k:
                raise ConfigError(
                    f"kernel {self.kernel_name!r} has order {kern.order} < declared k = {self.k}",
                    "/experiment/kernel",
                )
        else:
            hk = self.H * self.K
            if self.rho is None or not (
                isinstance(self.rho, (int, float)) and self.rho > hk
            ):
                raise ConfigError(
                    f"alternate variant requires rho > HK = {hk}, got {self.rho!r}",
                    "/experiment/rho",
                )
            if kern.order < math.ceil(self.rho) - 1:
                raise ConfigError(
                    f"kernel {self.kernel_name!r} has order {kern.order}, "
                    f"need >= {math.ceil(self.rho) - 1} for rho = {self.rho}",
                    "/experiment/kernel",
                )
        if not (isinstance(self.eval_count, int) and self.eval_count >= 1):
            raise ConfigError(
                f"eval_count must be a positive integer, got {self.eval_count!r}",
                "/experiment/eval_count",
            )
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**63):
            raise ConfigError(f"seed must be an integer in [0, 2^63), got {self.seed!r}", "/seed")
        if self.scheme not in ("integrating_factor", "euler"):
            raise ConfigError(f"unknown scheme {self.scheme!r}", "/experiment/scheme")
        if not (isinstance(self.threads, int) and self.threads >= 1):
            raise ConfigError(f"threads must be a positive integer, got {self.threads!r}", "/threads")
        if self.L is not None and not (
            isinstance(self.L, (int, float)) and math.isfinite(self.L) and self.L > 0
        ):
            raise ConfigError(f"L must be finite and > 0, got {self.L!r}", "/experiment/L")
        # window and bandwidth feasibility
        grid = TimeGrid(self.T, self.n)
        smallest = min(self.phi_for(e) for e in self.eps)
        if smallest < 3.0 * grid.delta:
            raise ConfigError(
                f"smallest bandwidth {smallest:.6g} covers fewer than 3 grid "
                f"steps; increase n or eps",
                "/grid/n",
            )
        lo, hi = self.clipped_window()
        if lo > hi:
            raise ConfigError(
                "evaluation window is empty once clipped to the interior "
                "condition at the largest bandwidth",
                "/experiment/eval_window",
            )

    # -- derived accessors ---------------------------------------------------

    def params(self) -> BifBmParams:
        return validate_params(self.H, self.K)

    def theta(self) -> TrendExpr:
        return parse(self.theta_text)

    def grid(self) -> TimeGrid:
        return TimeGrid(self.T, self.n)

    def kernel(self) -> Kernel:
        return kernel_from_name(self.kernel_name)

    def hk(self) -> float:
        return self.params().HK

    def phi_for(self, eps: float) -> float:
        if self.variant == "main":
            return bandwidth(eps, self.k, self.H * self.K)
        return alt_bandwidth(eps, self.rho, self.H * self.K)

    def clipped_window(self) -> tuple[float, float]:
        """Evaluation window clipped so every kernel window stays in [0, T]."""
        a, b = self.eval_window if self.eval_window else (0.15 * self.T, 0.85 * self.T)
        kern = self.kernel()
        reach = max(abs(kern.support[0]), abs(kern.support[1]))
        phi_max = max(self.phi_for(e) for e in self.eps)
        return max(a, reach * phi_max), min(b, self.T - reach * phi_max)

    def eval_points(self) -> np.ndarray:
        lo, hi = self.clipped_window()
        return np.linspace(lo, hi, self.eval_count)

    def effective_L(self) -> float:
        """Override, or sampled sup bound inflated once more for safety."""
        if self.L is not None:
            return float(self.L)
        return sup_bound(self.theta(), self.T) * 1.05


_SCHEMA = {
    "model": {"theta": str, "H": (int, float), "K": (int, float), "x0": (int, float)},
    "grid": {"T": (int, float), "n": int},
    "experiment": {
        "variant": str,
        "eps": list,
        "replications": int,
        "kernel": str,
        "k": int,
        "rho": (int, float),
        "eval_window": list,
        "eval_count": int,
        "t_star": (int, float),
        "coupled": bool,
        "scheme": str,
        "L": (int, float),
    },
    "seed": int,
    "threads": int,
}

_DEFAULTS = {
    ("model", "x0"): 1.0,
    ("experiment", "variant"): "main",
    ("experiment", "kernel"): "uniform",
    ("experiment", "k"): 0,
    ("experiment", "rho"): None,
    ("experiment", "eval_window"): None,
    ("experiment", "eval_count"): 21,
    ("experiment", "t_star"): None,
    ("experiment", "coupled"): False,
    ("experiment", "scheme"): "integrating_factor",
    ("experiment", "L"): None,
    ("threads",): 1,
}


def _typed(doc: dict, section: str, key: str, pointer: str):
    value = doc.get(section, {}).get(key, _DEFAULTS.get((section, key), _MISSING))
    expected = _SCHEMA[section][key]
    if value is _MISSING:
        raise ConfigError("required field is missing", pointer)
    if value is None and (section, key) in _DEFAULTS:
        return None
    if expected is int and isinstance(value, bool):
        raise ConfigError(f"expected an integer, got {value!r}", pointer)
    if not isinstance(value, expected):
        raise ConfigError(
            f"expected {getattr(expected, '__name__', expected)}, got {type(value).__name__}",
            pointer,
        )
    return value


class _Missing:
    pass


_MISSING = _Missing()


def load_config(doc: dict, overrides: dict | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from a decoded JSON document.

    Structural problems raise ConfigError with a JSON-pointer path; the
    dataclass then enforces the semantic invariants.  `overrides` maps
    top-level field names (seed, threads, eps, ...) onto replacement
    values, for command line flags.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object", "")
    for section in ("model", "grid", "experiment"):
        if section not in doc:
            raise ConfigError("required section is missing", f"/{section}")
        if not isinstance(doc[section], dict):
            raise ConfigError("section must be an object", f"/{section}")
    eps_raw = _typed(doc, "experiment", "eps", "/experiment/eps")
    if not all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in eps_raw):
        raise ConfigError("eps must be a list of numbers", "/experiment/eps")
    window = _typed(doc, "experiment", "eval_window", "/experiment/eval_window")
    if window is not None:
        ok = (
            isinstance(window, list)
            and len(window) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in window)
        )
        if not ok:
            raise ConfigError("eval_window must be [lo, hi]", "/experiment/eval_window")
        window = (float(window[0]), float(window[1]))
    seed = doc.get("seed", _MISSING)
    if seed is _MISSING:
        raise ConfigError("required field is missing (or pass --seed)", "/seed")
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}", "/seed")
    threads = doc.get("threads", 1)
    if isinstance(threads, bool) or not isinstance(threads, int):
        raise ConfigError(f"threads must be an integer, got {threads!r}", "/threads")

    fields = dict(
        theta_text=_typed(doc, "model", "theta", "/model/theta"),
        H=float(_typed(doc, "model", "H", "/model/H")),
        K=float(_typed(doc, "model", "K", "/model/K")),
        x0=float(_typed(doc, "model", "x0", "/model/x0")),
        T=float(_typed(doc, "grid", "T", "/grid/T")),
        n=_typed(doc, "grid", "n", "/grid/n"),
        eps=tuple(float(e) for e in eps_raw),
        replications=_typed(doc, "experiment", "replications", "/experiment/replications"),
        seed=seed,
        kernel_name=_typed(doc, "experiment", "kernel", "/experiment/kernel"),
        variant=_typed(doc, "experiment", "variant", "/experiment/variant"),
        k=_typed(doc, "experiment", "k", "/experiment/k"),
        rho=_typed(doc, "experiment", "rho", "/experiment/rho"),
        eval_window=window,
        eval_count=_typed(doc, "experiment", "eval_count", "/experiment/eval_count"),
        t_star=_typed(doc, "experiment", "t_star", "/experiment/t_star"),
        coupled=_typed(doc, "experiment", "coupled", "/experiment/coupled"),
        scheme=_typed(doc, "experiment", "scheme", "/experiment/scheme"),
        L=_typed(doc, "experiment", "L", "/experiment/L"),
        threads=threads,
    )
    if fields["rho"] is not None:
        fields["rho"] = float(fields["rho"])
    if fields["t_star"] is not None:
        fields["t_star"] = float(fields["t_star"])
    if fields["L"] is not None:
        fields["L"] = float(fields["L"])
    if overrides:
        fields.update(overrides)
    return ExperimentConfig(**fields)


def config_digest(cfg: ExperimentConfig) -> str:
    """First 16 hex digits of the SHA-256 of the canonical config JSON."""
    canonical = json.dumps(asdict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True, eq=False)
class EpsStat:
    eps: float
    phi: float
    sup_mse: float
    mc_se: float
    sup_t: float
    mse_by_t: np.ndarray


@dataclass(frozen=True, eq=False)
class NormalityStats:
    eps: float
    phi: float
    t_star: float
    alpha: float
    sigma2: float
    bias_const: float
    ad_stat: float
    ad_pvalue: float
    ks_stat: float
    ks_pvalue: float
    var_ratio: float
    z: np.ndarray


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    kind: str
    config: ExperimentConfig
    config_hash: str
    eval_points: np.ndarray | None = None
    eps_stats: list[EpsStat] | None = None
    slope: float | None = None
    slope_stderr: float | None = None
    theoretical_exponent: float | None = None
    normality: NormalityStats | None = None
    lemma31: Lemma31Report | None = None
    runtime_seconds: float = 0.0


def fit_loglog_slope(xs, ys) -> tuple[float, float]:
    """OLS slope of log ys against log xs, with its standard error."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DomainError("xs and ys must be 1-d arrays of equal length")
    if xs.size < 3:
        raise DomainError("cannot fit a slope from fewer than 3 points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("log-log fit requires strictly positive xs and ys")
    lx = np.log(xs)
    ly = np.log(ys)
    if np.ptp(lx) == 0.0:
        raise DomainError("xs are all identical; slope is undefined")
    design = lx - lx.mean()
    sxx = float(design @ design)
    slope = float(design @ (ly - ly.mean())) / sxx
    resid = ly - (ly.mean() + slope * design)
    dof = xs.size - 2
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return slope, stderr


# ---------------------------------------------------------------------------
# experiment drivers


def _stream_for(cfg: ExperimentConfig, e_index: int) -> tuple[int, ...]:
    return () if cfg.coupled else (e_index,)


def _chunk_ranges(total: int) -> list[tuple[int, int]]:
    return [(r0, min(r0 + CHUNK, total)) for r0 in range(0, total, CHUNK)]


def _run_chunks(cfg: ExperimentConfig, worker):
    ranges = _chunk_ranges(cfg.replications)
    if cfg.threads == 1:
        for r0, r1 in ranges:
            worker(r0, r1)
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            list(pool.map(lambda rr: worker(*rr), ranges))


def _j_targets(cfg: ExperimentConfig, ts: np.ndarray) -> np.ndarray:
    """J(t) = theta(t) x0 exp(int_0^t theta), integrals by adaptive quadrature."""
    from .trend import evaluate

    theta = cfg.theta()
    out = np.empty(ts.size)
    for i, t in enumerate(ts):
        integral, _ = integrate.quad(
            lambda u: evaluate(theta, u), 0.0, float(t),
            epsabs=1e-12, epsrel=1e-12, limit=200,
        )
        out[i] = evaluate(theta, float(t)) * cfg.x0 * math.exp(integral)
    return out


def run_rate_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    """Sup-MSE of the estimator at each eps, with a log-log slope fit."""
    started = time.perf_counter()
    if cfg.replications < 100:
        raise ConfigError(
            "rate sweeps need at least 100 replications", "/experiment/replications"
        )
    if len(cfg.eps) < 3:
        raise ConfigError(
            "rate sweeps need at least 3 eps levels to fit a slope", "/experiment/eps"
        )
    params = cfg.params()
    grid = cfg.grid()
    theta = cfg.theta()
    kernel = cfg.kernel()
    factor = build_factor(params, grid, cap=cfg.grid_cap)
    eval_ts = cfg.eval_points()
    from .trend import evaluate

    if cfg.variant == "main":
        target = _j_targets(cfg, eval_ts)
        theoretical = rate_exponent(cfg.k, params.HK)
    else:
        target = np.asarray(evaluate(theta, eval_ts))
        theoretical = alt_rate_exponent(cfg.rho, params.HK)
        alt_L = cfg.effective_L()

    stats: list[EpsStat] = []
    for e_index, eps in enumerate(cfg.eps):
        phi = cfg.phi_for(eps)
        if cfg.variant == "main":
            weights = weights_for_points(grid, kernel, phi, eval_ts)
        else:
            weights = weights_for_points(grid, kernel, phi, eval_ts, direction=-1)
        errs = np.empty((cfg.replications, eval_ts.size))
        stream = _stream_for(cfg, e_index)

        def worker(r0: int, r1: int):
            w = sample_matrix(factor, r1 - r0, cfg.seed, stream=stream, start=r0)
            x = simulate_matrix(theta, cfg.x0, eps, w, grid, cfg.scheme)
            if cfg.variant == "main":
                est = np.diff(x, axis=1) @ weights.T
            else:
                indicator, dy = auxiliary_matrix(x, grid, cfg.x0, alt_L)
                est = (dy @ weights.T) * indicator[:, -1:]
            errs[r0:r1] = est - target[None, :]

        _run_chunks(cfg, worker)
        sq = errs**2
        mse_by_t = sq.mean(axis=0)
        sup_idx = int(np.argmax(mse_by_t))
        mc_se = float(np.std(sq[:, sup_idx], ddof=1) / math.sqrt(cfg.replications))
        stats.append(
            EpsStat(
                eps=eps,
                phi=phi,
                sup_mse=float(mse_by_t[sup_idx]),
                mc_se=mc_se,
                sup_t=float(eval_ts[sup_idx]),
                mse_by_t=mse_by_t,
            )
        )
    slope, stderr = fit_loglog_slope(
        [s.eps for s in stats], [s.sup_mse for s in stats]
    )
    return ExperimentResult(
        kind="rate_sweep",
        config=cfg,
        config_hash=config_digest(cfg),
        eval_points=eval_ts,
        eps_stats=stats,
        slope=slope,
        slope_stderr=stderr,
        theoretical_exponent=theoretical,
        runtime_seconds=time.perf_counter() - started,
    )


def run_normality(cfg: ExperimentConfig) -> ExperimentResult:
    """Distribution of the centered, rescaled estimator at one interior time.

    Z_r = eps^{-alpha} (Jhat_r(t*) - J(t*)) - bias_const, tested against
    N(0, sigma2) by Anderson-Darling (primary) and Kolmogorov-Smirnov.
    The smallest eps entry is used.
    """
    started = time.perf_counter()
    if cfg.variant != "main":
        raise ConfigError("normality experiments use the main variant", "/experiment/variant")
    params = cfg.params()
    grid = cfg.grid()
    theta = cfg.theta()
    kernel = cfg.kernel()
    eps = min(cfg.eps)
    e_index = len(cfg.eps) - 1
    phi = cfg.phi_for(eps)
    lo, hi = cfg.clipped_window()
    t_star = cfg.t_star if cfg.t_star is not None else 0.5 * (lo + hi)
    if not (lo <= t_star <= hi):
        raise ConfigError(
            f"t_star = {t_star} outside the clipped window [{lo:.6g}, {hi:.6g}]",
            "/experiment/t_star",
        )
    alpha = center_exponent(cfg.k, params.HK)
    factor = build_factor(params, grid, cap=cfg.grid_cap)
    weights = weights_for_points(grid, kernel, phi, np.array([t_star]))
    target = _j_targets(cfg, np.array([t_star]))[0]
    bias = bias_constant(theta, cfg.x0, t_star, cfg.k, kernel)
    z = np.empty(cfg.replications)
    stream = _stream_for(cfg, e_index)

    def worker(r0: int, r1: int):
        w = sample_matrix(factor, r1 - r0, cfg.seed, stream=stream, start=r0)
        x = simulate_matrix(theta, cfg.x0, eps, w, grid, cfg.scheme)
        j_hat = np.diff(x, axis=1) @ weights[0]
        z[r0:r1] = eps ** (-alpha) * (j_hat - target) - bias

    _run_chunks(cfg, worker)
    limit_var = sigma2(params, kernel)
    scale = math.sqrt(limit_var)
    ad = anderson_darling(z, lambda q: sps.norm.cdf(q, loc=0.0, scale=scale))
    ks = sps.kstest(z, "norm", args=(0.0, scale))
    normality = NormalityStats(
        eps=eps,
        phi=phi,
        t_star=float(t_star),
        alpha=alpha,
        sigma2=limit_var,
        bias_const=bias,
        ad_stat=ad.statistic,
        ad_pvalue=ad.pvalue,
        ks_stat=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        var_ratio=float(np.var(z, ddof=1) / limit_var),
        z=z,
    )
    return ExperimentResult(
        kind="normality",
        config=cfg,
        config_hash=config_digest(cfg),
        normality=normality,
        runtime_seconds=time.perf_counter() - started,
    )


def run_lemma31(cfg: ExperimentConfig) -> ExperimentResult:
    """Pathwise envelope and moment bound of X around the limit path.

    Uses the first (largest) eps entry and L from the sampled sup bound
    unless the config pins L.
    """
    started = time.perf_counter()
    params = cfg.params()
    grid = cfg.grid()
    theta = cfg.theta()
    eps = cfg.eps[0]
    L = cfg.L if cfg.L is not None else sup_bound(theta, cfg.T)
    factor = build_factor(params, grid, cap=cfg.grid_cap)
    x_limit = limit_path(theta, cfg.x0, grid)
    w_all = np.empty((cfg.replications, grid.n + 1))
    x_all = np.empty_like(w_all)
    stream = _stream_for(cfg, 0)

    def worker(r0: int, r1: int):
        w = sample_matrix(factor, r1 - r0, cfg.seed, stream=stream, start=r0)
        w_all[r0:r1] = w
        x_all[r0:r1] = simulate_matrix(theta, cfg.x0, eps, w, grid, cfg.scheme)

    _run_chunks(cfg, worker)
    report = lemma31_check(x_all, x_limit, w_all, eps, L, params.HK)
    return ExperimentResult(
        kind="lemma31",
        config=cfg,
        config_hash=config_digest(cfg),
        eval_points=grid.points,
        lemma31=report,
        runtime_seconds=time.perf_counter() - started,
    )


# ---------------------------------------------------------------------------
# persistence


def _float(x) -> float:
    return float(x)


def _header(result: ExperimentResult) -> str:
    return (
        f"# config_hash={result.config_hash}\n"
        f"# seed={result.config.seed}\n"
    )


def write_result(result: ExperimentResult, outdir: str) -> list[str]:
    """Write deterministic result files; returns the file names written.

    summary.json plus kind-specific CSVs.  Nothing here depends on wall
    time; rerunning the same config and seed reproduces the bytes.
    """
    os.makedirs(outdir, exist_ok=True)
    written = []

    summary = {
        "kind": result.kind,
        "config": asdict(result.config),
        "config_hash": result.config_hash,
        "seed": result.config.seed,
    }
    if result.slope is not None:
        summary["slope"] = result.slope
        summary["slope_stderr"] = result.slope_stderr
        summary["theoretical_exponent"] = result.theoretical_exponent
    if result.eps_stats is not None:
        summary["eps_stats"] = [
            {
                "eps": s.eps,
                "bandwidth": s.phi,
                "sup_mse": s.sup_mse,
                "mc_se": s.mc_se,
                "sup_t": s.sup_t,
            }
            for s in result.eps_stats
        ]
    if result.normality is not None:
        ns = result.normality
        summary["normality"] = {
            "eps": ns.eps,
            "bandwidth": ns.phi,
            "t_star": ns.t_star,
            "alpha": ns.alpha,
            "sigma2": ns.sigma2,
            "bias_const": ns.bias_const,
            "ad_stat": ns.ad_stat,
            "ad_pvalue": ns.ad_pvalue,
            "ks_stat": ns.ks_stat,
            "ks_pvalue": ns.ks_pvalue,
            "var_ratio": ns.var_ratio,
            "replications": int(ns.z.size),
        }
    if result.lemma31 is not None:
        lr = result.lemma31
        summary["lemma31"] = {
            "eps": lr.eps,
            "L": lr.L,
            "hk": lr.hk,
            "n_paths": lr.n_paths,
            "slack": lr.slack,
            "violation_count": lr.violation_count,
            "max_excess": lr.max_excess,
            "max_excess_runsup": lr.max_excess_runsup,
            "sup_mse": lr.sup_mse,
            "sup_mse_se": lr.sup_mse_se,
            "mse_bound": lr.mse_bound,
            "bound_satisfied": lr.bound_satisfied,
        }
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    written.append("summary.json")

    if result.eps_stats is not None:
        with open(os.path.join(outdir, "sweep.csv"), "w", encoding="utf-8") as fh:
            fh.write(_header(result))
            fh.write("eps,bandwidth,sup_mse,mc_se\n")
            for s in result.eps_stats:
                fh.write(f"{s.eps!r},{s.phi!r},{s.sup_mse!r},{s.mc_se!r}\n")
        written.append("sweep.csv")
        for i, s in enumerate(result.eps_stats):
            name = f"mse_eps{i}.csv"
            with open(os.path.join(outdir, name), "w", encoding="utf-8") as fh:
                fh.write(_header(result))
                fh.write(f"# eps={s.eps!r}\n")
                fh.write("t,mse\n")
                for t, m in zip(result.eval_points, s.mse_by_t):
                    fh.write(f"{_float(t)!r},{_float(m)!r}\n")
            written.append(name)
    if result.normality is not None:
        with open(os.path.join(outdir, "z_sample.csv"), "w", encoding="utf-8") as fh:
            fh.write(_header(result))
            fh.write("z\n")
            for v in result.normality.z:
                fh.write(f"{_float(v)!r}\n")
        written.append("z_sample.csv")
    if result.lemma31 is not None:
        with open(os.path.join(outdir, "deviation_mse.csv"), "w", encoding="utf-8") as fh:
            fh.write(_header(result))
            fh.write("t,mse\n")
            for t, m in zip(result.eval_points, result.lemma31.mse_by_t):
                fh.write(f"{_float(t)!r},{_float(m)!r}\n")
        written.append("deviation_mse.csv")
    return written
