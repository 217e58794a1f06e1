"""Limit constants of the windowed estimators: rates, variance, bias.

Convergence rates.  With trend smoothness k (main estimator) or rho
(indicator-gated variant) and self-similarity index HK, the sup-MSE decays
as eps to the power

    main:      min(2, 2(k + 1) / (k + 2 - HK)),
    alternate: min(4, 2 rho / (rho - HK)),

at bandwidths eps^{1/(k - HK + 2)} and eps^{1/(rho - HK)} respectively.

Limit variance.  The centered, eps^{-(k+1)/(k-HK+2)}-scaled estimator is
asymptotically N(0, sigma2) with

    sigma2 = beta * iint G(u) G(v) |u - v|^{2HK-2} du dv.

Localizing the covariance density at scale phi kills its smooth alpha part
at rate phi^{2-2HK}, which is why only the singular beta term survives;
`sigma2(..., alpha_term=True)` adds the non-vanishing literal alpha
contribution for comparison experiments.  The double integral collapses to
one dimension through w = u - v:

    iint = 2 int_0^{B-A} w^{2HK-2} h(w) dw,
    h(w) = int_A^{B-w} G(v + w) G(v) dv,

where h is polynomial (evaluated by exact Gauss-Legendre) and the
algebraic endpoint singularity w^{2HK-2} is handled by weighted
Clenshaw-Curtis quadrature (QUADPACK QAWS).

Bias.  The leading bias constant of the centered estimator at an interior
t is J^(k+1)(t) moment_{k+1}(G) / (k+1)!, J(t) = theta(t) x_t, with the
derivative taken by Richardson-extrapolated central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .bifbm import BifBmParams
from .errors import DomainError, NumericalError, StencilError
from .kernels import Kernel
from .trend import TrendExpr, evaluate

__all__ = [
    "rate_exponent",
    "alt_rate_exponent",
    "center_exponent",
    "RateSpec",
    "main_rate_spec",
    "alt_rate_spec",
    "sigma2",
    "derivative_num",
    "bias_constant",
]


def _check_hk(hk: float):
    if not (isinstance(hk, (int, float)) and 0.5 < hk < 1.0):
        raise DomainError(f"hk must lie in (1/2, 1), got {hk!r}")


def rate_exponent(k: int, hk: float) -> float:
    """Sup-MSE decay exponent of the main estimator at its bandwidth."""
    if not (isinstance(k, int) and k >= 0):
        raise DomainError(f"k must be an integer >= 0, got {k!r}")
    _check_hk(hk)
    return min(2.0, 2.0 * (k + 1) / (k + 2.0 - hk))


def alt_rate_exponent(rho: float, hk: float) -> float:
    """MSE decay exponent claimed for the indicator-gated estimator."""
    _check_hk(hk)
    if not (isinstance(rho, (int, float)) and math.isfinite(rho) and rho > hk):
        raise DomainError(f"rho must exceed HK = {hk}, got {rho!r}")
    return min(4.0, 2.0 * rho / (rho - hk))


def center_exponent(k: int, hk: float) -> float:
    """Scaling exponent alpha with eps^{-alpha}(Jhat - J) asymptotically normal."""
    if not (isinstance(k, int) and k >= 0):
        raise DomainError(f"k must be an integer >= 0, got {k!r}")
    _check_hk(hk)
    value = (k + 1) / (k + 2.0 - hk)
    assert 0.0 < value < 1.0
    return value


@dataclass(frozen=True)
class RateSpec:
    """Theoretical exponents bundled for one experiment variant."""

    kind: str
    smoothness: float
    hk: float
    exponent: float
    alpha: float | None


def main_rate_spec(k: int, hk: float) -> RateSpec:
    return RateSpec("main", float(k), hk, rate_exponent(k, hk), center_exponent(k, hk))


def alt_rate_spec(rho: float, hk: float) -> RateSpec:
    return RateSpec("alternate", float(rho), hk, alt_rate_exponent(rho, hk), None)


# ---------------------------------------------------------------------------
# limit variance


def _autocorrelation(kernel: Kernel, w: float) -> float:
    # h(w) = int_A^{B-w} G(v + w) G(v) dv, exact for polynomial G
    a, b = kernel.support
    upper = b - w
    if upper <= a:
        return 0.0
    deg = len(kernel.coefficients) - 1
    nodes, weights = np.polynomial.legendre.leggauss(deg + 1)
    mid = 0.5 * (a + upper)
    half = 0.5 * (upper - a)
    v = mid + half * nodes
    return float(half * np.sum(weights * kernel(v + w) * kernel(v)))


def _alpha_integral(params: BifBmParams, kernel: Kernel, tol: float) -> float:
    # iint G(u)G(v) (|u|^{2H}+|v|^{2H})^{K-2} (|u||v|)^{2H-1} du dv by
    # quadrant, after x = |u|^{2H}, y = |v|^{2H} which flattens the
    # (|u||v|)^{2H-1} factor exactly.
    h2 = 2.0 * params.H
    a, b = kernel.support
    arms = {1.0: max(0.0, b), -1.0: max(0.0, -a)}
    total = 0.0
    for su, su_arm in arms.items():
        for sv, sv_arm in arms.items():
            if su_arm == 0.0 or sv_arm == 0.0:
                continue
            xu, xv = su_arm**h2, sv_arm**h2

            def inner(y: float) -> float:
                val, _ = integrate.quad(
                    lambda x: (x + y) ** (params.K - 2.0)
                    * float(kernel(su * x ** (1.0 / h2))),
                    0.0,
                    xu,
                    epsabs=tol / 16.0,
                    epsrel=1e-10,
                    limit=200,
                )
                return val * float(kernel(sv * y ** (1.0 / h2)))

            val, _ = integrate.quad(
                inner, 0.0, xv, epsabs=tol / 16.0, epsrel=1e-10, limit=200
            )
            total += val
    return total / (h2 * h2)


def sigma2(
    params: BifBmParams,
    kernel: Kernel,
    tol: float = 1e-8,
    alpha_term: bool = False,
) -> float:
    """Limit variance of the centered windowed estimator.

    Deterministic to the requested absolute tolerance; raises
    NumericalError when the quadrature error estimate exceeds it.  The
    default is the stationary beta-only form; alpha_term=True adds the
    literal smooth-part contribution (it does not survive the bandwidth
    limit and is kept only for comparison experiments).
    """
    if not (isinstance(tol, (int, float)) and 0.0 < tol <= 1e-2):
        raise DomainError(f"tol must lie in (0, 1e-2], got {tol!r}")
    gamma = 2.0 * params.HK - 2.0
    a, b = kernel.support
    width = b - a
    value, abserr = integrate.quad(
        lambda w: 2.0 * _autocorrelation(kernel, w),
        0.0,
        width,
        weight="alg",
        wvar=(gamma, 0.0),
        epsabs=tol / (2.0 * params.beta),
        epsrel=1e-12,
        limit=200,
    )
    total_err = params.beta * abserr
    result = params.beta * value
    if alpha_term and params.alpha != 0.0:
        result += params.alpha * _alpha_integral(params, kernel, tol / abs(params.alpha))
        total_err += tol / 2.0
    if not math.isfinite(result):
        raise NumericalError("limit variance quadrature returned a non-finite value")
    if total_err > tol:
        raise NumericalError(
            f"limit variance quadrature error {total_err:.3e} exceeds tol {tol:.3e}"
        )
    if result <= 0.0:
        raise NumericalError(f"limit variance came out non-positive: {result!r}")
    return result


# ---------------------------------------------------------------------------
# numerical derivatives and the bias constant

_STENCILS = {
    1: ((-1.0, 1.0), (-0.5, 0.5), 1),
    2: ((-1.0, 0.0, 1.0), (1.0, -2.0, 1.0), 2),
    3: ((-2.0, -1.0, 1.0, 2.0), (-0.5, 1.0, -1.0, 0.5), 3),
    4: ((-2.0, -1.0, 0.0, 1.0, 2.0), (1.0, -4.0, 6.0, -4.0, 1.0), 4),
}


def derivative_num(
    f: Callable[[float], float],
    t: float,
    order: int,
    h: float = 1e-2,
    domain: tuple[float, float] | None = None,
) -> float:
    """Central-difference derivative of given order, Richardson-extrapolated.

    Uses step sizes h and h/2 with a second-order stencil combination
    (4 D(h/2) - D(h)) / 3; exact for polynomials of degree order + 1.
    With `domain` set, the full width-h stencil must fit strictly inside,
    or StencilError is raised.
    """
    if order not in _STENCILS:
        raise DomainError(f"derivative order must be in 1..4, got {order!r}")
    if not (isinstance(h, (int, float)) and math.isfinite(h) and h > 0):
        raise DomainError(f"h must be finite and > 0, got {h!r}")
    offsets, coeffs, power = _STENCILS[order]
    reach = max(abs(o) for o in offsets) * h
    if domain is not None:
        lo, hi = domain
        if not (lo < t - reach and t + reach < hi):
            raise StencilError(
                f"stencil of half-width {reach:.6g} at t = {t:.6g} does not "
                f"fit inside ({lo:.6g}, {hi:.6g})"
            )

    def apply(step: float) -> float:
        return sum(c * f(t + o * step) for o, c in zip(offsets, coeffs)) / step**power

    coarse = apply(h)
    fine = apply(h / 2.0)
    return (2.0**2 * fine - coarse) / (2.0**2 - 1.0)


def bias_constant(
    theta: TrendExpr,
    x0: float,
    t: float,
    k: int,
    kernel: Kernel,
    h: float = 1e-2,
) -> float:
    """Leading bias constant J^(k+1)(t) moment_{k+1}(G) / (k+1)!.

    J(t) = theta(t) x0 exp(int_0^t theta); the derivative order k + 1 must
    be at most 4.  Symmetric kernels with even k give exactly 0 through
    the vanishing moment.
    """
    if not (isinstance(k, int) and 0 <= k <= 3):
        raise DomainError(f"bias constant supports k in 0..3, got {k!r}")
    m = kernel.moment(k + 1)
    if m == 0.0:
        return 0.0

    def j_value(s: float) -> float:
        integral, _ = integrate.quad(
            lambda u: evaluate(theta, u), 0.0, s, epsabs=1e-12, epsrel=1e-12, limit=200
        )
        return evaluate(theta, s) * x0 * math.exp(integral)

    deriv = derivative_num(j_value, t, order=k + 1, h=h)
    return deriv * m / math.factorial(k + 1)
