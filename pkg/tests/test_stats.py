"""Anderson-Darling with the Marsaglia & Marsaglia p-value approximation."""

import numpy as np
import pytest
from scipy import stats as sps

from biftrend.errors import DomainError
from biftrend.stats import AdResult, _adinf, anderson_darling


@pytest.mark.parametrize(
    "z,tail",
    [
        (0.644, 0.60740),
        (2.492, 0.05001),
        (3.857, 0.01024),
        (6.000, 0.00097),
    ],
)
def test_asymptotic_tail_reference_points(z, tail):
    # reference tail probabilities of the asymptotic A^2 distribution
    got = 1.0 - _adinf(z)
    assert abs(got - tail) < 5e-5, f"tail({z}) = {got:.5f}, want {tail}"


def test_accepts_true_null():
    rng = np.random.default_rng(11)
    sample = rng.standard_normal(500)
    result = anderson_darling(sample, sps.norm.cdf)
    assert isinstance(result, AdResult)
    assert result.pvalue > 1e-3, f"rejected a true null: p = {result.pvalue:.4g}"
    assert result.statistic < 4.0


def test_rejects_wrong_scale():
    rng = np.random.default_rng(12)
    sample = 1.3 * rng.standard_normal(500)
    result = anderson_darling(sample, sps.norm.cdf)
    assert result.pvalue < 1e-3, f"failed to reject scale 1.3: p = {result.pvalue:.4g}"


def test_rejects_uniform_against_normal():
    rng = np.random.default_rng(13)
    sample = rng.uniform(-1.0, 1.0, 400)
    result = anderson_darling(sample, sps.norm.cdf)
    assert result.pvalue < 1e-3


def test_null_pvalues_roughly_uniform():
    """Under the null, p-values should be near-uniform; check the 10% level."""
    rng = np.random.default_rng(14)
    pvals = []
    for _ in range(400):
        sample = rng.standard_normal(64)
        pvals.append(anderson_darling(sample, sps.norm.cdf).pvalue)
    pvals = np.asarray(pvals)
    rate = float(np.mean(pvals < 0.10))
    assert 0.05 < rate < 0.16, f"10% rejection rate came out {rate:.3f}"
    assert 0.40 < float(pvals.mean()) < 0.60


def test_handles_extreme_observations():
    rng = np.random.default_rng(15)
    sample = np.concatenate([rng.standard_normal(100), [40.0, -40.0]])
    result = anderson_darling(sample, sps.norm.cdf)
    assert np.isfinite(result.statistic)
    assert 0.0 <= result.pvalue <= 1.0


def test_small_sample_rejected():
    with pytest.raises(DomainError):
        anderson_darling(np.zeros(7), sps.norm.cdf)


def test_matches_scipy_statistic_for_standard_normal():
    # scipy's anderson() normalizes differently but the raw A^2 statistic
    # against a fully specified normal matches the textbook formula scipy
    # uses internally; compare through an independent direct computation
    rng = np.random.default_rng(16)
    sample = np.sort(rng.standard_normal(200))
    u = sps.norm.cdf(sample)
    n = sample.size
    i = np.arange(1, n + 1)
    want = -n - np.mean((2 * i - 1) * (np.log(u) + np.log1p(-u[::-1])))
    got = anderson_darling(sample, sps.norm.cdf).statistic
    assert got == pytest.approx(want, rel=1e-12)
