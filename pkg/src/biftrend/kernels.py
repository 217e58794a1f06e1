"""Compactly supported polynomial smoothing kernels with exact moments.

A kernel is a polynomial G restricted to a bounded support [A, B] with
unit mass.  Its order is the largest j such that all moments 1..j vanish;
bias expansions of the windowed estimators are driven by the first
non-vanishing moment.  Moments are evaluated from the monomial
coefficients in closed form, so tests can hold them to 1e-12.

`poly_kernel(k)` builds the minimal-degree even polynomial on [-1, 1]
whose moments 1..k vanish (for even k symmetry gives one extra vanishing
moment, so the order is k + 1).  `uniform_kernel()` is the indicator
kernel on [-1/2, 1/2], order 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg

from .errors import DomainError

__all__ = ["Kernel", "uniform_kernel", "poly_kernel", "kernel_from_name"]

_MAX_POLY_K = 6


@dataclass(frozen=True, eq=False)
class Kernel:
    """Polynomial kernel: G(x) = sum_i coefficients[i] x^i on [A, B], else 0."""

    name: str
    support: tuple[float, float]
    coefficients: np.ndarray
    order: int

    def __post_init__(self):
        a, b = self.support
        if not a < b:
            raise DomainError(f"kernel support must satisfy A < B, got ({a}, {b})")
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=float)
        )
        if abs(self.moment(0) - 1.0) > 1e-12:
            raise DomainError(f"kernel {self.name!r} does not integrate to 1")
        for j in range(1, self.order + 1):
            if abs(self.moment(j)) > 1e-10:
                raise DomainError(
                    f"kernel {self.name!r} claims order {self.order} but "
                    f"moment {j} = {self.moment(j):.3e}"
                )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.support
        inside = (x >= a) & (x <= b)
        vals = np.polynomial.polynomial.polyval(x, self.coefficients)
        return np.where(inside, vals, 0.0)

    def moment(self, j: int) -> float:
        """Exact int_A^B x^j G(x) dx from the monomial coefficients."""
        if not (isinstance(j, int) and j >= 0):
            raise DomainError(f"moment index must be an integer >= 0, got {j!r}")
        a, b = self.support
        total = 0.0
        for i, c in enumerate(self.coefficients):
            p = i + j + 1
            total += c * (b**p - a**p) / p
        return total


def uniform_kernel() -> Kernel:
    """Indicator kernel 1 on [-1/2, 1/2]; order 1 by symmetry."""
    return Kernel("uniform", (-0.5, 0.5), np.array([1.0]), order=1)


def _legendre_even_moment(a: int, ell: int) -> float:
    # int_{-1}^{1} u^a P_ell(u) du via the power-basis expansion of P_ell
    coeffs = npleg.leg2poly([0.0] * ell + [1.0])
    total = 0.0
    for b, c in enumerate(coeffs):
        if (a + b) % 2 == 0:
            total += c * 2.0 / (a + b + 1)
    return total


def poly_kernel(k: int) -> Kernel:
    """Minimal even polynomial kernel on [-1, 1] with moments 1..k vanishing.

    Built in the even-degree Legendre basis P_0, P_2, ..., so the linear
    system {moment 0 = 1, even moments <= k = 0} is square; odd moments
    vanish by symmetry.  Order is k for odd k and k + 1 for even k.
    """
    if not (isinstance(k, int) and 0 <= k <= _MAX_POLY_K):
        raise DomainError(f"poly kernel requires integer 0 <= k <= {_MAX_POLY_K}, got {k!r}")
    m = k // 2 if k % 2 == 0 else (k - 1) // 2
    system = np.empty((m + 1, m + 1))
    for i in range(m + 1):
        for j in range(m + 1):
            system[i, j] = _legendre_even_moment(2 * i, 2 * j)
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    even_coeffs = np.linalg.solve(system, rhs)
    leg = np.zeros(2 * m + 1)
    leg[::2] = even_coeffs
    power = npleg.leg2poly(leg)
    order = k + 1 if k % 2 == 0 else k
    return Kernel(f"poly:{k}", (-1.0, 1.0), power, order=order)


def kernel_from_name(name: str) -> Kernel:
    """Resolve "uniform" or "poly:<k>" to a kernel instance."""
    if name == "uniform":
        return uniform_kernel()
    if name.startswith("poly:"):
        suffix = name[len("poly:"):]
        try:
            k = int(suffix)
        except ValueError:
            raise DomainError(f"malformed kernel name {name!r}") from None
        return poly_kernel(k)
    raise DomainError(f"unknown kernel {name!r}; expected 'uniform' or 'poly:<k>'")
