"""Exact-in-law sampling of bifractional paths on uniform grids.

Paths start at W_0 = 0, so the Gaussian vector to draw lives on the
strictly positive grid points t_1..t_n.  Its covariance matrix is dense
and ill-conditioned for large n; `build_factor` computes a lower Cholesky
factor, escalating a diagonal jitter only as far as needed.  Replication
r always consumes the dedicated stream spawn(seed, r), so results do not
depend on batch sizes, thread counts, or evaluation order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .bifbm import BifBmParams, covariance_matrix
from .errors import DomainError, NumericalError

__all__ = [
    "TimeGrid",
    "SamplePath",
    "PATH_LABELS",
    "CovFactor",
    "build_factor",
    "replication_rng",
    "sample_matrix",
    "sample_paths",
    "SelfSimilarityReport",
    "self_similarity_check",
    "dump_paths",
]

PATH_LABELS = ("bifbm", "observed_X", "limit_x", "auxiliary_Y")

DEFAULT_GRID_CAP = 8192


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Uniform grid 0 = t_0 < t_1 < ... < t_n = T."""

    T: float
    n: int
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (isinstance(self.T, (int, float)) and math.isfinite(self.T) and self.T > 0):
            raise DomainError(f"T must be a finite positive number, got {self.T!r}")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "points", np.linspace(0.0, float(self.T), self.n + 1))

    @property
    def delta(self) -> float:
        return self.T / self.n


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Values of one path on a grid, tagged by what the path represents."""

    grid: TimeGrid
    values: np.ndarray
    label: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n + 1,):
            raise DomainError(
                f"values must have shape ({self.grid.n + 1},), got {values.shape}"
            )
        if self.label not in PATH_LABELS:
            raise DomainError(f"label must be one of {PATH_LABELS}, got {self.label!r}")
        if self.label == "bifbm" and values[0] != 0.0:
            raise DomainError("a bifbm path must start at 0")
        object.__setattr__(self, "values", values)

    def increments(self) -> np.ndarray:
        return np.diff(self.values)


@dataclass(frozen=True, eq=False)
class CovFactor:
    """Lower Cholesky factor of the grid covariance, with the jitter used."""

    grid: TimeGrid
    params: BifBmParams
    lower: np.ndarray
    jitter: float


def build_factor(
    params: BifBmParams, grid: TimeGrid, cap: int = DEFAULT_GRID_CAP
) -> CovFactor:
    """Cholesky-factor the covariance of (W_{t_1}, ..., W_{t_n}).

    Jitter escalates through 0, 1e-12 * trace/n, 1e-10, 1e-8 before giving
    up with NumericalError.  `cap` bounds n because cost grows as n^3.
    """
    if grid.n > cap:
        raise DomainError(f"grid size n = {grid.n} exceeds cap {cap}")
    cov = covariance_matrix(params, grid.points[1:])
    scale = float(np.trace(cov)) / grid.n
    for jitter in (0.0, 1e-12 * scale, 1e-10, 1e-8):
        try:
            lower = np.linalg.cholesky(
                cov if jitter == 0.0 else cov + jitter * np.eye(grid.n)
            )
        except np.linalg.LinAlgError:
            continue
        return CovFactor(grid=grid, params=params, lower=lower, jitter=jitter)
    raise NumericalError(
        f"covariance factorization failed for n = {grid.n}, "
        f"H = {params.H}, K = {params.K} even with jitter 1e-8"
    )


def replication_rng(
    seed: int, r: int, stream: tuple[int, ...] = ()
) -> np.random.Generator:
    """Dedicated generator for replication r of a seeded experiment.

    `stream` prefixes the spawn key, so distinct experiment arms (noise
    levels, negative controls) draw independent noise without touching
    the replication indexing.
    """
    if not (isinstance(seed, int) and 0 <= seed < 2**63):
        raise DomainError(f"seed must be an integer in [0, 2^63), got {seed!r}")
    if not (isinstance(r, int) and r >= 0):
        raise DomainError(f"replication index must be an integer >= 0, got {r!r}")
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(*stream, r))
    )


# matrix products run over panels of exactly this many replications, aligned
# to absolute replication index, so path r is bitwise identical no matter how
# a caller batches or threads the sampling
_PANEL = 64


def sample_matrix(
    factor: CovFactor,
    count: int,
    seed: int,
    stream: tuple[int, ...] = (),
    start: int = 0,
) -> np.ndarray:
    """Sample paths for replications start..start+count-1, one per row.

    Row i is path start+i on the full grid including t_0 = 0, and depends
    only on (seed, stream, start + i): batch boundaries, thread counts,
    and evaluation order cannot change the numbers.
    """
    if not (isinstance(count, int) and count >= 1):
        raise DomainError(f"count must be an integer >= 1, got {count!r}")
    if not (isinstance(start, int) and start >= 0):
        raise DomainError(f"start must be an integer >= 0, got {start!r}")
    n = factor.grid.n
    paths = np.empty((count, n + 1))
    paths[:, 0] = 0.0
    first_panel = (start // _PANEL) * _PANEL
    last_panel = ((start + count + _PANEL - 1) // _PANEL) * _PANEL
    for p0 in range(first_panel, last_panel, _PANEL):
        normals = np.empty((n, _PANEL))
        for j in range(_PANEL):
            normals[:, j] = replication_rng(seed, p0 + j, stream).standard_normal(n)
        panel = (factor.lower @ normals).T
        lo = max(p0, start)
        hi = min(p0 + _PANEL, start + count)
        paths[lo - start : hi - start, 1:] = panel[lo - p0 : hi - p0]
    return paths


def sample_paths(
    factor: CovFactor, count: int, seed: int, stream: tuple[int, ...] = ()
) -> list[SamplePath]:
    """Sample paths as SamplePath objects (see sample_matrix for the law)."""
    matrix = sample_matrix(factor, count, seed, stream=stream)
    return [SamplePath(factor.grid, row, "bifbm") for row in matrix]


@dataclass(frozen=True)
class SelfSimilarityReport:
    statistic: float
    pvalue: float
    a: float
    exponent: float
    count: int


def self_similarity_check(
    params: BifBmParams,
    T: float,
    a: float,
    count: int,
    seed: int,
    n: int = 16,
    scaling_exponent: float | None = None,
) -> SelfSimilarityReport:
    """Two-sample KS test of W_{aT} against a^e W_T on independent batches.

    With the self-similarity exponent e = HK (the default) the two samples
    share a law, so the test should not reject; passing a deliberately
    wrong exponent makes this a negative control.
    """
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 0 and a != 1.0):
        raise DomainError(f"scale a must be positive, finite, and != 1, got {a!r}")
    exponent = params.HK if scaling_exponent is None else float(scaling_exponent)
    base = np.random.SeedSequence(entropy=seed)
    child_t, child_at = base.spawn(2)
    terminal = {}
    for key, horizon, ss in (("T", T, child_t), ("aT", a * T, child_at)):
        factor = build_factor(params, TimeGrid(horizon, n))
        z = np.random.default_rng(ss).standard_normal((n, count))
        terminal[key] = (factor.lower[-1, :] @ z)
    scaled = a**exponent * terminal["T"]
    result = sps.ks_2samp(terminal["aT"], scaled)
    return SelfSimilarityReport(
        statistic=float(result.statistic),
        pvalue=float(result.pvalue),
        a=float(a),
        exponent=exponent,
        count=count,
    )


def dump_paths(paths: list[SamplePath], directory: str, prefix: str = "path") -> list[str]:
    """Write one `t,value` CSV per path; returns the file names written."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for i, path in enumerate(paths):
        name = f"{prefix}_{i:04d}.csv"
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write("t,value\n")
            for t, v in zip(path.grid.points, path.values):
                fh.write(f"{float(t)!r},{float(v)!r}\n")
        names.append(name)
    return names
