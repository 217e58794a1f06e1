"""Bifractional Brownian motion: parameters, covariance, and increment bounds.

The process W = (W_t)_{t >= 0} with indices H in (0,1), K in (0,1] is the
centered Gaussian process with covariance

    R(s, t) = 2^{-K} [ (t^{2H} + s^{2H})^K - |t - s|^{2HK} ].

K = 1 recovers fractional Brownian motion with Hurst index H.  Throughout
the package the product HK is restricted to (1/2, 1): the regime with
positive increment correlation in which Var(W_t) = t^{2HK}, the process is
self-similar with index HK, and for 0 <= s < t the off-diagonal mixed
partial of R exists and equals

    d2R/ds dt = alpha (t^{2H} + s^{2H})^{K-2} (t s)^{2H-1}
              + beta |t - s|^{2HK - 2},

    alpha = 2^{-K+2} H^2 K (K - 1) <= 0,
    beta  = 2^{-K+1} H K (2HK - 1)  > 0.

Increments obey the two-sided power bound ("quasi-helix")

    2^{-K} |t - s|^{2HK}  <=  E[(W_t - W_s)^2]  <=  2^{1-K} |t - s|^{2HK}.

Numerics.  Evaluating R naively loses all precision near the diagonal,
where the two bracketed terms nearly cancel.  `covariance` instead uses,
for 0 < s <= t and r = s/t,

    R = 2^{-K} t^{2HK} [ expm1(K log1p(r^{2H})) - expm1(2HK log1p(-r)) ],

whose two expm1 terms have opposite signs, so no subtractive cancellation
occurs anywhere in the parameter domain; the diagonal reduces to t^{2HK}
exactly and s = 0 returns 0 exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "BifBmParams",
    "validate_params",
    "covariance",
    "covariance_matrix",
    "covariance_density",
    "increment_second_moment",
    "increment_bounds",
]

# below this the smaller time is treated as exactly 0 to avoid spurious
# underflow inside the power/log chain
_TINY = 1e-300


@dataclass(frozen=True)
class BifBmParams:
    """Validated index pair with derived constants.

    Construction enforces 0 < H < 1, 0 < K <= 1 and HK in (1/2, 1)
    strictly; `alpha` and `beta` are the mixed-partial constants defined in
    the module docstring.
    """

    H: float
    K: float
    HK: float = field(init=False)
    alpha: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        H, K = self.H, self.K
        for name, v in (("H", H), ("K", K)):
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise DomainError(f"{name} must be a finite number, got {v!r}")
        if not 0.0 < H < 1.0:
            raise DomainError(f"H must lie in (0, 1), got {H}")
        if not 0.0 < K <= 1.0:
            raise DomainError(f"K must lie in (0, 1], got {K}")
        hk = H * K
        if not 0.5 < hk < 1.0:
            raise DomainError(
                f"HK must lie in (1/2, 1) strictly, got HK = {hk} "
                f"(H = {H}, K = {K})"
            )
        object.__setattr__(self, "H", float(H))
        object.__setattr__(self, "K", float(K))
        object.__setattr__(self, "HK", hk)
        object.__setattr__(self, "alpha", 2.0 ** (-K + 2) * H * H * K * (K - 1.0))
        object.__setattr__(self, "beta", 2.0 ** (-K + 1) * H * K * (2.0 * hk - 1.0))


def validate_params(H: float, K: float) -> BifBmParams:
    """Build a BifBmParams, raising DomainError with the violated constraint."""
    return BifBmParams(H, K)


def _check_time(name: str, v: float) -> float:
    if not (isinstance(v, (int, float)) and math.isfinite(v)) or v < 0.0:
        raise DomainError(f"{name} must be a finite time >= 0, got {v!r}")
    return float(v)


def covariance(p: BifBmParams, s: float, t: float) -> float:
    """R(s, t) evaluated without cancellation; exact on the diagonal and axes."""
    s = _check_time("s", s)
    t = _check_time("t", t)
    lo, hi = (s, t) if s <= t else (t, s)
    if hi == 0.0 or lo < _TINY:
        return 0.0
    if lo == hi:
        return hi ** (2.0 * p.HK)
    r = lo / hi
    term = math.expm1(p.K * math.log1p(r ** (2.0 * p.H))) - math.expm1(
        2.0 * p.HK * math.log1p(-r)
    )
    return 2.0 ** (-p.K) * hi ** (2.0 * p.HK) * term


def covariance_matrix(p: BifBmParams, times: np.ndarray) -> np.ndarray:
    """Covariance matrix R(t_i, t_j) on a vector of times, vectorized.

    Same evaluation scheme as `covariance`; entries involving t = 0 are 0
    and diagonal entries are exactly t^{2HK}.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise DomainError("times must be one-dimensional")
    if not np.all(np.isfinite(times)) or np.any(times < 0.0):
        raise DomainError("times must be finite and >= 0")
    ti = times[:, None]
    tj = times[None, :]
    hi = np.maximum(ti, tj)
    lo = np.minimum(ti, tj)
    out = np.zeros((times.size, times.size))
    off = (lo >= _TINY) & (lo < hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(off, lo / np.where(hi > 0, hi, 1.0), 0.0)
        term = np.expm1(p.K * np.log1p(r ** (2.0 * p.H))) - np.expm1(
            2.0 * p.HK * np.log1p(-r)
        )
        out[off] = (2.0 ** (-p.K) * hi ** (2.0 * p.HK) * term)[off]
    diag = (lo == hi) & (hi > 0.0)
    out[diag] = (hi ** (2.0 * p.HK))[diag]
    return out


def covariance_density(p: BifBmParams, s: float, t: float) -> float:
    """Off-diagonal mixed partial d2R/ds dt at 0 < s != t.

    alpha (t^{2H}+s^{2H})^{K-2} (ts)^{2H-1} + beta |t-s|^{2HK-2}; diverges
    like |t-s|^{2HK-2} as s -> t.  Positive for K = 1 (fBm, HK > 1/2).
    """
    s = _check_time("s", s)
    t = _check_time("t", t)
    if s == 0.0 or t == 0.0:
        raise DomainError("covariance_density requires s > 0 and t > 0")
    if s == t:
        raise DomainError("covariance_density is singular on the diagonal s = t")
    smooth = p.alpha * (t ** (2 * p.H) + s ** (2 * p.H)) ** (p.K - 2.0) * (t * s) ** (
        2.0 * p.H - 1.0
    )
    return smooth + p.beta * abs(t - s) ** (2.0 * p.HK - 2.0)


def increment_second_moment(p: BifBmParams, s: float, t: float) -> float:
    """Exact E[(W_t - W_s)^2] = R(t,t) - 2 R(s,t) + R(s,s)."""
    return (
        covariance(p, t, t) - 2.0 * covariance(p, s, t) + covariance(p, s, s)
    )


def increment_bounds(p: BifBmParams, s: float, t: float) -> tuple[float, float]:
    """Two-sided bound (2^{-K} d^{2HK}, 2^{1-K} d^{2HK}), d = |t - s|."""
    s = _check_time("s", s)
    t = _check_time("t", t)
    d = abs(t - s) ** (2.0 * p.HK)
    return 2.0 ** (-p.K) * d, 2.0 ** (1.0 - p.K) * d
