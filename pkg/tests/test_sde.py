"""SDE integration: exactness of the integrating factor, Euler convergence,
affinity in the noise level, and the deviation envelope report."""

import math

import numpy as np
import pytest

from biftrend.bifbm import BifBmParams
from biftrend.errors import DomainError, NumericalError
from biftrend.sampling import SamplePath, TimeGrid, build_factor, sample_matrix, sample_paths
from biftrend.sde import (
    cumulative_integral,
    lemma31_check,
    limit_path,
    simulate,
    simulate_matrix,
    step_integrals,
)
from biftrend.trend import parse


# ---- deterministic pieces ----


def test_step_integrals_exact_for_polynomials():
    # three-point Gauss-Legendre is exact through degree 5
    grid = TimeGrid(2.0, 16)
    theta = parse("t^4 - 2*t^2 + 0.5")
    got = step_integrals(theta, grid)
    t = grid.points
    antider = t**5 / 5 - 2 * t**3 / 3 + 0.5 * t
    want = np.diff(antider)
    assert np.max(np.abs(got - want)) < 1e-13


def test_cumulative_integral_sine():
    grid = TimeGrid(3.0, 512)
    got = cumulative_integral(parse("sin(t)"), grid)
    want = 1.0 - np.cos(grid.points)
    assert got[0] == 0.0
    assert np.max(np.abs(got - want)) < 1e-9


def test_cumulative_integral_refine_must_be_even():
    with pytest.raises(DomainError):
        cumulative_integral(parse("t"), TimeGrid(1.0, 8), refine=3)


def test_limit_path_constant_theta():
    grid = TimeGrid(1.0, 128)
    path = limit_path(parse("0.5"), 2.0, grid)
    want = 2.0 * np.exp(0.5 * grid.points)
    assert path.label == "limit_x"
    assert np.max(np.abs(path.values - want)) < 1e-10


def test_limit_path_overflow_guard():
    with pytest.raises(NumericalError):
        limit_path(parse("1000"), 1.0, TimeGrid(1.0, 16))


# ---- stochastic integration ----


def _noise(params, grid, count, seed):
    factor = build_factor(params, grid)
    return sample_matrix(factor, count, seed)


def test_integrating_factor_exact_at_zero_noise():
    # constant theta: per-step growth e^{theta delta} is exact, so eps = 0
    # reproduces the limit path to roundoff
    params = BifBmParams(H=0.9, K=0.7)
    grid = TimeGrid(1.0, 256)
    theta = parse("0.5")
    w = _noise(params, grid, 4, seed=11)
    x = simulate_matrix(theta, 1.0, 0.0, w, grid, "integrating_factor")
    want = np.exp(0.5 * grid.points)
    assert np.max(np.abs(x - want[None, :])) < 1e-12


def test_euler_first_order_integrating_factor_better():
    """At eps = 0 the Euler error decays like delta; the IF error is tiny."""
    params = BifBmParams(H=0.9, K=0.7)
    theta = parse("sin(3*t)")
    errs_euler = []
    errs_if = []
    sizes = [256, 512, 1024, 2048]
    for n in sizes:
        grid = TimeGrid(1.0, n)
        w = np.zeros((1, n + 1))
        limit = limit_path(theta, 1.0, grid)
        xe = simulate_matrix(theta, 1.0, 0.0, w, grid, "euler")
        xi = simulate_matrix(theta, 1.0, 0.0, w, grid, "integrating_factor")
        errs_euler.append(np.max(np.abs(xe[0] - limit.values)))
        errs_if.append(np.max(np.abs(xi[0] - limit.values)))
    slopes = np.diff(np.log(errs_euler)) / np.diff(np.log(1.0 / np.asarray(sizes)))
    assert abs(slopes.mean() - 1.0) < 0.2, f"Euler slope {slopes.mean():.3f}, want ~1"
    assert max(errs_if) < 1e-10, f"integrating factor error {max(errs_if):.2e}"


def test_simulation_affine_in_eps():
    # X(eps) - x is linear in eps for the integrating factor recursion
    params = BifBmParams(H=0.75, K=0.8)
    grid = TimeGrid(1.0, 128)
    theta = parse("0.3*t+0.2")
    w = _noise(params, grid, 8, seed=21)
    x0v = simulate_matrix(theta, 1.0, 0.0, w, grid, "integrating_factor")
    x1 = simulate_matrix(theta, 1.0, 0.05, w, grid, "integrating_factor")
    x2 = simulate_matrix(theta, 1.0, 0.10, w, grid, "integrating_factor")
    lhs = x2 - x0v
    rhs = 2.0 * (x1 - x0v)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_simulate_requires_bifbm_label():
    params = BifBmParams(H=0.75, K=0.8)
    grid = TimeGrid(1.0, 32)
    noise = sample_paths(build_factor(params, grid), 1, seed=5)[0]
    observed = simulate(parse("0.5"), 1.0, 0.1, noise, "integrating_factor")
    assert observed.label == "observed_X"
    with pytest.raises(DomainError):
        simulate(parse("0.5"), 1.0, 0.1, observed, "integrating_factor")


def test_simulate_matrix_rejects_unknown_scheme():
    grid = TimeGrid(1.0, 8)
    w = np.zeros((1, 9))
    with pytest.raises(DomainError):
        simulate_matrix(parse("0.5"), 1.0, 0.1, w, grid, "milstein")


def test_simulate_matrix_overflow_names_the_problem():
    # exp(400) per half-step compounds past the float64 range by t = 1
    grid = TimeGrid(1.0, 2)
    w = np.zeros((1, 3))
    with np.errstate(over="ignore"), pytest.raises(NumericalError) as err:
        simulate_matrix(parse("800"), 1.0, 0.0, w, grid, "integrating_factor")
    assert "step" in str(err.value)


# ---- deviation report ----


def test_lemma31_zero_noise_has_no_violations():
    params = BifBmParams(H=0.9, K=0.7)
    grid = TimeGrid(1.0, 256)
    theta = parse("0.5")
    w = _noise(params, grid, 16, seed=31)
    x = simulate_matrix(theta, 1.0, 0.0, w, grid, "integrating_factor")
    limit = limit_path(theta, 1.0, grid)
    report = lemma31_check(x, limit, w, eps=0.0, L=0.525, hk=params.HK)
    assert report.violation_count == 0, (
        f"{report.violation_count} roundoff-level violations at eps = 0"
    )
    assert report.sup_mse < 1e-24
    assert report.n_paths == 16


def test_lemma31_moment_bound_holds_at_small_noise():
    params = BifBmParams(H=0.9, K=0.7)
    grid = TimeGrid(1.0, 256)
    theta = parse("0.5")
    w = _noise(params, grid, 64, seed=41)
    eps = 0.05
    x = simulate_matrix(theta, 1.0, eps, w, grid, "integrating_factor")
    limit = limit_path(theta, 1.0, grid)
    report = lemma31_check(x, limit, w, eps=eps, L=0.525, hk=params.HK)
    assert report.bound_satisfied, (
        f"sup MSE {report.sup_mse:.3e} exceeded bound {report.mse_bound:.3e}"
    )
    assert report.mse_by_t.shape == grid.points.shape
    assert report.mse_by_t[0] == 0.0
    # running-sup-corrected envelope: never looser than the pointwise one
    assert report.max_excess_runsup <= report.max_excess + 1e-15


def test_lemma31_rejects_mismatched_inputs():
    params = BifBmParams(H=0.9, K=0.7)
    grid = TimeGrid(1.0, 64)
    theta = parse("0.5")
    w = _noise(params, grid, 4, seed=51)
    x = simulate_matrix(theta, 1.0, 0.1, w, grid, "integrating_factor")
    limit = limit_path(theta, 1.0, grid)
    with pytest.raises(DomainError):
        lemma31_check(x, limit, w[:3], eps=0.1, L=0.5, hk=params.HK)
    with pytest.raises(DomainError):
        lemma31_check(x, limit, w, eps=0.1, L=-1.0, hk=params.HK)
    with pytest.raises(DomainError):
        lemma31_check(x, limit, w, eps=0.1, L=0.5, hk=0.4)
    with pytest.raises(DomainError):
        lemma31_check(x, limit.values, w, eps=0.1, L=0.5, hk=params.HK)
