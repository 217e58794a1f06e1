"""Windowed kernel estimators of the trend multiplier.

The observable target is J(t) = theta(t) x_t.  Its estimator averages
path increments through a bandwidth-phi kernel window,

    Jhat(t) = (1/phi) sum_i G((tau_i - t)/phi) (X_{t_{i+1}} - X_{t_i}),

with tau_i the step midpoint.  Dividing by X_t (guarded by a relative
floor) turns it into a raw trend estimate.  The alternate estimator
divides increments by the running state first, gated by a latched
indicator that the path has stayed above half the worst-case limit
envelope; it targets theta directly without knowing x_t.

Every windowed call requires the kernel support mapped through (t, phi)
to sit inside [0, T] and the bandwidth to cover at least three grid
steps; violations raise BandwidthError rather than silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BandwidthError, DomainError
from .kernels import Kernel
from .sampling import SamplePath, TimeGrid

__all__ = [
    "bandwidth",
    "alt_bandwidth",
    "weights_for_points",
    "estimate_J",
    "ThetaEstimate",
    "estimate_theta",
    "EstimateSeries",
    "estimate_series",
    "AltInput",
    "build_auxiliary",
    "auxiliary_matrix",
    "estimate_theta_alt",
]

MIN_STEPS_PER_WINDOW = 3
FLOOR_REL = 1e-4


def _check_eps(eps: float):
    if not (isinstance(eps, (int, float)) and 0.0 < eps < 1.0):
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")


def bandwidth(eps: float, k: int, hk: float) -> float:
    """Rate-optimal window phi = eps^{1/(k - HK + 2)} for the main estimator."""
    _check_eps(eps)
    if not (isinstance(k, int) and k >= 0):
        raise DomainError(f"k must be an integer >= 0, got {k!r}")
    if not (0.5 < hk < 1.0):
        raise DomainError(f"hk must lie in (1/2, 1), got {hk!r}")
    return float(eps) ** (1.0 / (k - hk + 2.0))


def alt_bandwidth(eps: float, rho: float, hk: float) -> float:
    """Window phi = eps^{1/(rho - HK)} for the indicator-gated estimator."""
    _check_eps(eps)
    if not (0.5 < hk < 1.0):
        raise DomainError(f"hk must lie in (1/2, 1), got {hk!r}")
    if not (isinstance(rho, (int, float)) and math.isfinite(rho) and rho > hk):
        raise DomainError(f"rho must exceed HK = {hk}, got {rho!r}")
    return float(eps) ** (1.0 / (rho - hk))


def weights_for_points(
    grid: TimeGrid,
    kernel: Kernel,
    phi: float,
    ts: np.ndarray,
    direction: int = 1,
) -> np.ndarray:
    """Kernel weight matrix: row j applies the window centered at ts[j].

    Row j holds G(direction * (tau_i - ts[j]) / phi) / phi over the step
    midpoints tau_i, so `matrix @ increments` evaluates the windowed sums.
    """
    if not (isinstance(phi, (int, float)) and math.isfinite(phi) and phi > 0):
        raise DomainError(f"phi must be finite and > 0, got {phi!r}")
    if phi < MIN_STEPS_PER_WINDOW * grid.delta:
        raise BandwidthError(
            f"bandwidth {phi:.6g} covers fewer than {MIN_STEPS_PER_WINDOW} "
            f"grid steps (delta = {grid.delta:.6g})"
        )
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    a, b = kernel.support
    lo, hi = (a, b) if direction == 1 else (-b, -a)
    tol = 1e-12 * grid.T
    if np.any(ts + lo * phi < -tol) or np.any(ts + hi * phi > grid.T + tol):
        bad = ts[(ts + lo * phi < -tol) | (ts + hi * phi > grid.T + tol)][0]
        raise BandwidthError(
            f"kernel window at t = {bad:.6g} with phi = {phi:.6g} leaves [0, T]"
        )
    mids = 0.5 * (grid.points[:-1] + grid.points[1:])
    return kernel(direction * (mids[None, :] - ts[:, None]) / phi) / phi


def estimate_J(
    x_path: SamplePath, kernel: Kernel, phi: float, t: float
) -> float:
    """Windowed increment average Jhat(t); linear in the path increments."""
    weights = weights_for_points(x_path.grid, kernel, phi, np.array([t]))
    return float(weights[0] @ x_path.increments())


class ThetaEstimate(NamedTuple):
    value: float
    j_hat: float
    x_at_t: float
    defined: bool


def estimate_theta(
    x_path: SamplePath,
    kernel: Kernel,
    phi: float,
    t: float,
    floor: float | None = None,
) -> ThetaEstimate:
    """Jhat(t) / X_t with an undefined flag when |X_t| sits below the floor.

    The floor defaults to 1e-4 |x0|; an undefined point carries value nan
    and defined = False instead of raising.
    """
    j = estimate_J(x_path, kernel, phi, t)
    x_t = float(np.interp(t, x_path.grid.points, x_path.values))
    delta = FLOOR_REL * abs(float(x_path.values[0])) if floor is None else float(floor)
    if abs(x_t) < delta:
        return ThetaEstimate(math.nan, j, x_t, False)
    return ThetaEstimate(j / x_t, j, x_t, True)


@dataclass(frozen=True, eq=False)
class EstimateSeries:
    """Jhat and theta-hat over a vector of evaluation times."""

    t: np.ndarray
    j_hat: np.ndarray
    theta_hat: np.ndarray
    defined: np.ndarray
    phi: float
    kernel_name: str

    def write_csv(self, fh):
        fh.write("t,J_hat,theta_hat,defined_flag\n")
        for t, j, th, d in zip(self.t, self.j_hat, self.theta_hat, self.defined):
            fh.write(f"{float(t)!r},{float(j)!r},{float(th)!r},{int(d)}\n")


def estimate_series(
    x_path: SamplePath,
    kernel: Kernel,
    phi: float,
    ts: np.ndarray,
    floor: float | None = None,
) -> EstimateSeries:
    """Vectorized estimate_theta over evaluation times."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    weights = weights_for_points(x_path.grid, kernel, phi, ts)
    j_hat = weights @ x_path.increments()
    x_at = np.interp(ts, x_path.grid.points, x_path.values)
    delta = FLOOR_REL * abs(float(x_path.values[0])) if floor is None else float(floor)
    defined = np.abs(x_at) >= delta
    theta_hat = np.where(defined, j_hat / np.where(defined, x_at, 1.0), np.nan)
    return EstimateSeries(
        t=ts,
        j_hat=j_hat,
        theta_hat=theta_hat,
        defined=defined,
        phi=float(phi),
        kernel_name=kernel.name,
    )


# ---------------------------------------------------------------------------
# indicator-gated alternate estimator


@dataclass(frozen=True, eq=False)
class AltInput:
    """Auxiliary increment-ratio path with its survival indicator."""

    x_path: SamplePath
    x0: float
    L: float
    eps: float
    indicator: np.ndarray
    y_path: SamplePath
    active_at_T: bool


def auxiliary_matrix(
    x_matrix: np.ndarray, grid: TimeGrid, x0: float, L: float
) -> tuple[np.ndarray, np.ndarray]:
    """Latched survival indicator and dY increments for a batch of paths.

    The survival condition at t_i is min_{j <= i} X_j >= x0 e^{-L t_i} / 2;
    once it fails it stays failed.  dY_i = I_i dX_i / X_{t_i} with the
    indicator and divisor at the left endpoint.
    """
    if not (isinstance(x0, (int, float)) and math.isfinite(x0) and x0 > 0):
        raise DomainError(f"x0 must be finite and > 0, got {x0!r}")
    if not (isinstance(L, (int, float)) and math.isfinite(L) and L > 0):
        raise DomainError(f"L must be finite and > 0, got {L!r}")
    x_matrix = np.atleast_2d(np.asarray(x_matrix, dtype=float))
    if x_matrix.shape[1] != grid.n + 1:
        raise DomainError("state matrix does not match the grid")
    thresholds = 0.5 * x0 * np.exp(-L * grid.points)
    runmin = np.minimum.accumulate(x_matrix, axis=1)
    indicator = np.logical_and.accumulate(runmin >= thresholds[None, :], axis=1)
    active_left = indicator[:, :-1]
    dx = np.diff(x_matrix, axis=1)
    safe_left = np.where(active_left, x_matrix[:, :-1], 1.0)
    dy = np.where(active_left, dx / safe_left, 0.0)
    return indicator.astype(float), dy


def build_auxiliary(
    x_path: SamplePath, x0: float, L: float, eps: float
) -> AltInput:
    """Assemble the auxiliary path Y and its indicator for one observed path."""
    if not isinstance(x_path, SamplePath) or x_path.label != "observed_X":
        raise DomainError("build_auxiliary requires a SamplePath labeled 'observed_X'")
    if abs(float(x_path.values[0]) - x0) > 1e-9 * max(1.0, abs(x0)):
        raise DomainError(
            f"x0 = {x0!r} does not match the path start {x_path.values[0]!r}"
        )
    indicator, dy = auxiliary_matrix(x_path.values[None, :], x_path.grid, x0, L)
    y_values = np.concatenate([[0.0], np.cumsum(dy[0])])
    return AltInput(
        x_path=x_path,
        x0=float(x0),
        L=float(L),
        eps=float(eps),
        indicator=indicator[0],
        y_path=SamplePath(x_path.grid, y_values, "auxiliary_Y"),
        active_at_T=bool(indicator[0, -1] > 0),
    )


def estimate_theta_alt(
    aux: AltInput, kernel: Kernel, phi: float, t: float
) -> float:
    """Windowed increment average of Y, forced to 0 once the indicator fails.

    thetatilde(t) = I(A_T) (1/phi) sum_i G((t - tau_i)/phi) dY_i.
    """
    weights = weights_for_points(
        aux.x_path.grid, kernel, phi, np.array([t]), direction=-1
    )
    if not aux.active_at_T:
        return 0.0
    return float(weights[0] @ aux.y_path.increments())
