from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erfcx

from abfrac.special import (
    ConvergenceError,
    DomainError,
    MLArgs,
    MLTruncation,
    log_gamma,
    mittag_leffler,
    ml_one,
    ml_three,
    ml_two,
)

from . import oracles


def test_exponential():
    assert ml_one(1.0, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert ml_one(1.0, -2.5) == pytest.approx(math.exp(-2.5), rel=1e-14)


@pytest.mark.parametrize(
    ("alpha", "beta", "z", "expected"),
    [
        (0.5, 1.0, -1.0, 0.42758357615580700441),
        (0.5, 0.5, -0.3, 0.34380978317745975013),
    ],
)
def test_frozen_values(alpha, beta, z, expected):
    assert ml_two(alpha, beta, z) == pytest.approx(expected, rel=1e-14)


def test_three_parameter_frozen():
    assert ml_three(MLArgs(0.4, 1.0, 2.0, -0.25)) == pytest.approx(
        0.59227446955868995016, rel=1e-14
    )


def test_closed_forms():
    # E_2(-z^2) = cos z, E_{1,2}(z) = (e^z - 1)/z, E_{1/2}(z) = exp(z^2) erfc(-z)
    assert ml_two(2.0, 1.0, -(1.3**2)) == pytest.approx(math.cos(1.3), rel=1e-14)
    assert ml_two(1.0, 2.0, 0.7) == pytest.approx(math.expm1(0.7) / 0.7, rel=1e-14)
    z = 0.8
    assert ml_one(0.5, z) == pytest.approx(math.exp(z * z) * math.erfc(-z), rel=1e-13)


@pytest.mark.parametrize("z", [-5.0, -12.0, -30.0])
def test_cancellation_fallback(z):
    # the terms peak far above the result; the double-precision sum alone is useless here
    expected = erfcx(-z)
    assert ml_one(0.5, z) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(("alpha", "beta", "z"), [(0.3, 1.0, -2.0), (1.7, 0.6, 3.0), (0.9, 2.0, -8.0)])
def test_against_multiprecision(alpha, beta, z):
    assert ml_two(alpha, beta, z) == pytest.approx(oracles.ml(alpha, beta, z), rel=1e-13)


def test_three_parameter_against_multiprecision():
    for rho in (0.5, 2.0, 3.5):
        got = ml_three(MLArgs(0.7, 1.2, rho, -1.5))
        assert got == pytest.approx(oracles.ml(0.7, 1.2, -1.5, rho=rho), rel=1e-13)


def test_log_gamma():
    assert log_gamma(7.0) == pytest.approx(6.5792512120101009951, rel=1e-15)
    assert log_gamma(0.5) == pytest.approx(0.57236494292470008707, rel=1e-15)
    with pytest.raises(DomainError):
        log_gamma(0.0)


def test_vectorized_matches_scalar():
    z = np.linspace(-20, 3, 47)
    got = mittag_leffler(0.6, 1.1, z)
    want = np.array([ml_two(0.6, 1.1, x) for x in z])
    np.testing.assert_allclose(got, want, rtol=1e-13)


def test_domain_errors():
    with pytest.raises(DomainError):
        ml_two(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        MLArgs(0.5, 1.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        MLTruncation(rel_tol=0.0)


def test_term_budget():
    with pytest.raises(ConvergenceError):
        ml_two(0.5, 1.0, 5.0, MLTruncation(max_terms=10, min_terms=2))


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(0.1, 2.0),
    beta=st.floats(0.1, 2.0),
    z=st.floats(-1.0, 1.0),
)
def test_delegation_and_reduction(alpha, beta, z):
    assert ml_two(alpha, 1.0, z) == ml_one(alpha, z)
    e2 = ml_two(alpha, beta, z)
    assert ml_three(MLArgs(alpha, beta, 1.0, z)) == pytest.approx(e2, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(0.2, 1.5), beta=st.floats(0.2, 2.0), z=st.floats(-3.0, 2.0))
def test_beta_recurrence(alpha, beta, z):
    # E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)
    lhs = ml_two(alpha, beta, z)
    rhs = 1 / math.gamma(beta) + z * ml_two(alpha, alpha + beta, z)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)
