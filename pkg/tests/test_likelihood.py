import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jlparadox.bayes import bayes_factor_asymptotic
from jlparadox.errors import InvalidInputError
from jlparadox.likelihood import (LikelihoodCurve, log_likelihood, log_max_lik_ratio, max_lik_ratio,
                                  mle_from_samples, neg2_log_lik_ratio)

PEAK = -0.9189385332046727  # -ln sqrt(2 pi)


def test_peak():
    assert log_likelihood(LikelihoodCurve(0.0, 1.0), 0.0) == pytest.approx(PEAK, abs=1e-6)


def test_unit_displacement():
    assert log_likelihood(LikelihoodCurve(0.0, 1.0), 1.0) == pytest.approx(PEAK - 0.5, abs=1e-12)


def test_wider_curve():
    # ln N(0; 3, 2^2) evaluated with mpmath
    assert log_likelihood(LikelihoodCurve(3.0, 2.0), 0.0) == pytest.approx(-2.737085713764618, abs=1e-12)
    assert log_likelihood(LikelihoodCurve(3.0, 2.0), 0.0) == pytest.approx(
        log_likelihood(LikelihoodCurve(3.0, 2.0), 3.0) - 9 / 8, abs=1e-12)


@given(st.floats(-50, 50), st.floats(0.01, 10), st.floats(-100, 100))
def test_maximized_at_estimate(th, s, theta):
    c = LikelihoodCurve(th, s)
    if theta != th:
        assert log_likelihood(c, theta) < log_likelihood(c, th) or (theta - th) ** 2 / s**2 < 1e-14


@pytest.mark.parametrize("z,printed", [(1, "0.61"), (2, "0.14"), (3, "0.011"), (4, "0.00034"), (5, "3.7E-06")])
def test_lambda_table(z, printed):
    lam = max_lik_ratio(z)
    digits = 2
    assert float(f"{lam:.{digits}g}") == pytest.approx(float(printed), rel=1e-12)


def test_lambda_at_null():
    assert max_lik_ratio(0.0) == 1.0


def test_log_form_for_large_z():
    assert max_lik_ratio(50.0) == 0.0
    assert log_max_lik_ratio(50.0) == -1250.0
    assert neg2_log_lik_ratio(5.0) == 25.0


@given(st.floats(0, 8), st.floats(1e-3, 1e8))
def test_asymptotic_bf_is_ockham_times_lambda(z, r):
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert bayes_factor_asymptotic(z, r).bf == r * max_lik_ratio(z)


@given(st.floats(0, 8), st.floats(0.01, 100), st.floats(0.01, 100))
def test_lambda_independent_of_scale(z, s1, s2):
    # same z from two different sigma_tot give identical lambda
    c1, c2 = LikelihoodCurve(z * s1, s1), LikelihoodCurve(z * s2, s2)
    l1 = log_likelihood(c1, 0.0) - log_likelihood(c1, z * s1)
    l2 = log_likelihood(c2, 0.0) - log_likelihood(c2, z * s2)
    assert l1 == pytest.approx(l2, abs=1e-9)
    assert math.exp(l1) == pytest.approx(max_lik_ratio(z), rel=1e-9, abs=1e-300)


class TestMLE:
    def test_single(self):
        m = mle_from_samples([5.0], 1.0)
        assert (m.theta_hat, m.sigma_tot, m.n) == (5.0, 1.0, 1)

    def test_four(self):
        m = mle_from_samples([1, 2, 3, 4], 2.0)
        assert m.theta_hat == 2.5
        assert m.sigma_tot == 1.0

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            mle_from_samples([], 1.0)

    def test_monte_carlo_coverage(self):
        hits = 0
        for seed in range(1000):
            x = np.random.default_rng(seed).normal(0.0, 1.0, 100)
            hits += abs(mle_from_samples(x, 1.0).theta_hat) < 0.3
        # 3-sigma band holds 99.73% of the time; allow binomial slack
        assert hits >= 990
