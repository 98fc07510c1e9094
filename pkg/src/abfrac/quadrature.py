"""Quadrature building blocks on uniform meshes.

The main piece is :class:`ProductRule`, a product-integration rule for
difference kernels :math:`\\int_a^t K(t-s) g(s)\\,ds` in which :math:`g` is
replaced by its piecewise-linear interpolant and the kernel moments over
each panel are computed exactly (closed form on the panel touching the
diagonal, high-order Gauss-Legendre elsewhere).
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma, zeta

from abfrac.special import mittag_leffler, ml_two

#: Gauss-Legendre nodes per panel for kernel moments away from the diagonal.
PANEL_GAUSS_POINTS = 12


class QuadratureRule(enum.Enum):
    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"


def trapezoid(y: np.ndarray, h: float) -> float:
    y = np.asarray(y)
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))


def simpson(y: np.ndarray, h: float) -> float:
    y = np.asarray(y)
    if (y.size - 1) % 2:
        raise ValueError(f"Simpson needs an even number of intervals, got {y.size - 1}")
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def integrate(y: np.ndarray, h: float, rule: QuadratureRule = QuadratureRule.TRAPEZOID) -> float:
    if rule is QuadratureRule.SIMPSON:
        return simpson(y, h)
    return trapezoid(y, h)


def endpoint_power_correction(coeff: float, power: float, h: float) -> float:
    r"""Leading trapezoid error for an endpoint term :math:`c\,|t - t_{end}|^{\mu}`.

    For a non-integer :math:`\mu > 0` the composite trapezoid rule over a
    uniform mesh that ends at the singular point satisfies

    .. math::

        T_h - \int = \zeta(-\mu)\, c\, h^{1+\mu} + O(h^2),

    so subtracting the returned value from :math:`T_h` removes the
    :math:`O(h^{1+\mu})` term.
    """
    return float(zeta(-power) * coeff * h ** (1 + power))


def fd4_derivative(y: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative, one-sided near the ends."""
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    if n < 5:
        raise ValueError("fourth-order differences need at least 5 points")
    d = np.empty(n)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    c0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * h)
    c1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12 * h)
    d[0] = c0 @ y[:5]
    d[1] = c1 @ y[:5]
    d[-1] = -(c0 @ y[::-1][:5])
    d[-2] = -(c1 @ y[::-1][:5])
    return d


# {{{ product integration


@dataclass(frozen=True)
class ProductRule:
    """Product-integration weights for a difference kernel on a uniform mesh.

    ``d0[m-1]`` and ``e1[m-1]`` are the moments :math:`\\int K(\\tau)\\,d\\tau`
    and :math:`\\int K(\\tau)(\\tau - (m-1)h)\\,d\\tau` over the panel
    :math:`[(m-1)h, mh]`. ``node_kernel[m]`` is :math:`K(mh)` when the kernel
    is bounded at the origin.
    """

    h: float
    d0: np.ndarray
    e1: np.ndarray
    node_kernel: np.ndarray | None = None

    @property
    def n_points(self) -> int:
        return self.d0.size + 1

    def transform_left(self, g: np.ndarray) -> np.ndarray:
        r"""Approximate :math:`\int_{t_0}^{t_i} K(t_i - s)\,g(s)\,ds` at every node."""
        n = g.shape[-1]
        if n > self.n_points:
            raise ValueError(f"rule built for {self.n_points} points, got {n}")
        a = self.e1[: n - 1] / self.h  # weight of the panel's far node
        c = self.d0[: n - 1] - a  # weight of the panel's near node
        w = np.empty(n)
        w[0] = c[0] if n > 1 else 0.0
        w[1:] = a[: n - 1]
        w[1 : n - 1] += c[1 : n - 1]
        out = np.convolve(g, w)[:n]
        # at node i the farthest panel reaches g_0 with weight a[i-1] only
        out[1 : n - 1] -= c[1 : n - 1] * g[0]
        out[0] = 0.0
        return out

    def transform_right(self, g: np.ndarray) -> np.ndarray:
        r"""Approximate :math:`\int_{t_i}^{t_{n-1}} K(s - t_i)\,g(s)\,ds`."""
        return self.transform_left(g[::-1])[::-1]

    def derivative_left(self, g: np.ndarray) -> np.ndarray:
        r"""Exact derivative of :meth:`transform_left` at the nodes

        .. math::

            \frac{d}{dt}\int_{t_0}^{t} K(t-s)\,g(s)\,ds
                = K(t - t_0)\,g(t_0) + \int_{t_0}^t K(t-s)\,g'(s)\,ds,

        with :math:`g'` the piecewise-constant slope of the interpolant.
        """
        if self.node_kernel is None:
            raise ValueError("kernel is unbounded at the origin; no derivative rule")
        n = g.shape[-1]
        slope = np.diff(g) / self.h
        out = np.empty(n)
        out[0] = self.node_kernel[0] * g[0]
        out[1:] = self.node_kernel[1:n] * g[0] + np.convolve(slope, self.d0[: n - 1])[: n - 1]
        return out

    def derivative_right(self, g: np.ndarray) -> np.ndarray:
        r"""Exact derivative of :math:`-\frac{d}{dt}` :meth:`transform_right`, i.e. the mirror of :meth:`derivative_left`."""
        return self.derivative_left(g[::-1])[::-1]

    def slope_transform_left(self, g: np.ndarray) -> np.ndarray:
        """Left transform of the piecewise-constant slope of *g*."""
        n = g.shape[-1]
        out = np.zeros(n)
        out[1:] = np.convolve(np.diff(g) / self.h, self.d0[: n - 1])[: n - 1]
        return out


def _panel_moments(
    kernel: Callable[[np.ndarray], np.ndarray], h: float, n_panels: int
) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(PANEL_GAUSS_POINTS)
    lo = np.arange(n_panels) * h
    tau = lo[:, None] + 0.5 * h * (x[None, :] + 1)
    kv = kernel(tau)
    wt = 0.5 * h * w[None, :]
    d0 = (kv * wt).sum(axis=1)
    e1 = (kv * (tau - lo[:, None]) * wt).sum(axis=1)
    return d0, e1


@lru_cache(maxsize=32)
def ml_product_rule(alpha: float, lam: float, h: float, n_points: int) -> ProductRule:
    r"""Rule for the kernel :math:`K(\tau) = E_\alpha(\lambda \tau^\alpha)`.

    On the first panel the moments are

    .. math::

        \int_0^h K = h\,E_{\alpha,2}(\lambda h^\alpha), \qquad
        \int_0^h \tau K = h^2\,[E_{\alpha,2}(\lambda h^\alpha) - E_{\alpha,3}(\lambda h^\alpha)].
    """
    def kernel(tau: np.ndarray) -> np.ndarray:
        return mittag_leffler(alpha, 1.0, lam * tau**alpha)

    d0, e1 = _panel_moments(kernel, h, n_points - 1)
    z = lam * h**alpha
    e2, e3 = ml_two(alpha, 2.0, z), ml_two(alpha, 3.0, z)
    d0[0] = h * e2
    e1[0] = h * h * (e2 - e3)
    node = kernel(np.arange(n_points) * h)
    for arr in (d0, e1, node):
        arr.flags.writeable = False
    return ProductRule(h, d0, e1, node)


@lru_cache(maxsize=32)
def power_product_rule(alpha: float, h: float, n_points: int) -> ProductRule:
    r"""Rule for the kernel :math:`K(\tau) = \tau^{\alpha-1}/\Gamma(\alpha)`."""
    g = math.gamma(alpha)

    def kernel(tau: np.ndarray) -> np.ndarray:
        return tau ** (alpha - 1) / g

    d0, e1 = _panel_moments(kernel, h, n_points - 1)
    d0[0] = h**alpha / gamma(alpha + 1)
    e1[0] = h ** (alpha + 1) / ((alpha + 1) * g)
    for arr in (d0, e1):
        arr.flags.writeable = False
    return ProductRule(h, d0, e1, None)


# }}}


# {{{ convergence


def convergence_order(hs: Sequence[float], residuals: Sequence[float]) -> float:
    """Least-squares slope of ``log(residual)`` against ``log(h)``."""
    hs = np.asarray(hs, dtype=np.float64)
    r = np.asarray(residuals, dtype=np.float64)
    if hs.size < 2 or hs.size != r.size:
        raise ValueError("need at least two (h, residual) pairs")
    if np.any(r <= 0):
        return math.inf
    slope, _ = np.polyfit(np.log(hs), np.log(r), 1)
    return float(slope)


def calibrate_mesh_tolerance(
    hs: Sequence[float], residuals: Sequence[float], order: float = 1.8
) -> float:
    """Constant ``C`` so that ``residual <= C * h**order`` on every calibration mesh."""
    return float(max(r / h**order for h, r in zip(hs, residuals)))


# }}}
