from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import gamma

from abfrac import quadrature as qd
from abfrac.special import ml_two


def test_newton_cotes_exactness():
    x = np.linspace(0, 2, 11)
    h = x[1] - x[0]
    assert qd.trapezoid(3 * x + 1, h) == pytest.approx(8.0, rel=1e-14)
    assert qd.simpson(x**3, h) == pytest.approx(4.0, rel=1e-14)
    assert qd.integrate(x**2, h, qd.QuadratureRule.SIMPSON) == pytest.approx(8 / 3, rel=1e-14)
    with pytest.raises(ValueError):
        qd.simpson(np.ones(4), 0.1)


@pytest.mark.parametrize("mu", [0.3, 0.5, 0.8])
def test_endpoint_power_correction(mu):
    # trapezoid on sqrt-type endpoint behaviour: the correction restores second order
    errs, errs_corr = [], []
    hs = []
    for n in (101, 201, 401):
        x = np.linspace(0, 1, n)
        h = x[1] - x[0]
        y = x**mu + np.cos(x)
        exact = 1 / (1 + mu) + math.sin(1)
        t = qd.trapezoid(y, h)
        errs.append(abs(t - exact))
        errs_corr.append(abs(t - qd.endpoint_power_correction(1.0, mu, h) - exact))
        hs.append(h)
    assert qd.convergence_order(hs, errs) == pytest.approx(1 + mu, abs=0.05)
    assert qd.convergence_order(hs, errs_corr) > 1.9


def test_fd4_exact_on_quartics():
    x = np.linspace(-1, 2, 13)
    y = x**4 - 2 * x**3 + x
    np.testing.assert_allclose(qd.fd4_derivative(y, x[1] - x[0]), 4 * x**3 - 6 * x**2 + 1, atol=1e-11)
    with pytest.raises(ValueError):
        qd.fd4_derivative(np.ones(4), 0.1)


def test_power_rule_exact_on_linear():
    alpha, n = 0.4, 41
    h = 1 / (n - 1)
    t = np.linspace(0, 1, n)
    rule = qd.power_product_rule(alpha, h, n)
    got = rule.transform_left(2 + 3 * t)
    want = 2 * t**alpha / gamma(alpha + 1) + 3 * t ** (alpha + 1) / gamma(alpha + 2)
    np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-15)
    got_r = rule.transform_right(2 + 3 * t)
    # by symmetry the right transform of 5 - 3t mirrors the left one of 2 + 3t
    np.testing.assert_allclose(rule.transform_right(5 - 3 * t), got[::-1], rtol=1e-13, atol=1e-15)
    assert got_r[-1] == 0.0


def test_ml_rule_exact_on_linear():
    alpha, lam, n = 0.5, -1.0, 51
    h = 1 / (n - 1)
    t = np.linspace(0, 1, n)
    rule = qd.ml_product_rule(alpha, lam, h, n)
    # int_0^t E_a(lam s^a) ds = t E_{a,2}(lam t^a)
    got = rule.transform_left(np.ones(n))
    want = np.array([x * ml_two(alpha, 2.0, lam * x**alpha) for x in t])
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-15)
    # its derivative is the kernel itself
    np.testing.assert_allclose(rule.derivative_left(np.ones(n)), rule.node_kernel, rtol=1e-14)
    np.testing.assert_allclose(rule.slope_transform_left(t), got, rtol=1e-12, atol=1e-15)


def test_rule_length_checked():
    rule = qd.power_product_rule(0.5, 0.1, 11)
    with pytest.raises(ValueError):
        rule.transform_left(np.ones(12))
    with pytest.raises(ValueError):
        rule.derivative_left(np.ones(11))


def test_convergence_helpers():
    hs = [0.1, 0.05, 0.025]
    assert qd.convergence_order(hs, [3 * h**2 for h in hs]) == pytest.approx(2.0)
    assert qd.convergence_order(hs, [0.0, 0.0, 0.0]) == math.inf
    assert qd.calibrate_mesh_tolerance(hs[:2], [1e-2, 3e-3], 2.0) == pytest.approx(1.2)
