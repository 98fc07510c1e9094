"""Nabla discrete operators with discrete Mittag-Leffler kernels.

All first-order operators need :math:`0 < \\alpha < 1/2`, where the kernel
argument :math:`\\lambda = -\\alpha/(1-\\alpha)` satisfies :math:`|\\lambda| < 1`.
The higher-order forms take :math:`1 < \\alpha < 3/2` and reduce to the
first-order operators of order :math:`\\beta = \\alpha - 1`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from abfrac.discrete import (
    DiscreteMLArgs,
    Grid,
    GridFn,
    common_grid,
    delta,
    discrete_ml,
    ml_kernel_values,
    nabla,
    nabla_sum_left,
    nabla_sum_right,
    pad_left,
    pad_right,
)
from abfrac.special import DomainError


@dataclass(frozen=True)
class ABParams:
    r"""Fractional order :math:`\alpha` and normalization value :math:`B(\alpha)`.

    For the higher-order forms, ``b_of_alpha`` is the value :math:`B(\alpha-1)`
    that multiplies the reduced operators.
    """

    alpha: float
    b_of_alpha: float = 1.0

    def __post_init__(self) -> None:
        if not self.b_of_alpha > 0:
            raise DomainError(f"normalization must be positive: {self.b_of_alpha}")
        if self.alpha in (0.0, 1.0) and self.b_of_alpha != 1.0:
            raise DomainError("normalization must equal 1 at alpha = 0 and alpha = 1")

    @property
    def lam(self) -> float:
        r""":math:`-\alpha/(1-\alpha)`."""
        return -self.alpha / (1.0 - self.alpha)

    @property
    def scale(self) -> float:
        r""":math:`B(\alpha)/(1-\alpha)`."""
        return self.b_of_alpha / (1.0 - self.alpha)

    @property
    def beta(self) -> float:
        return self.alpha - 1.0

    @property
    def lam_beta(self) -> float:
        r""":math:`-(\alpha-1)/(2-\alpha)`."""
        return -(self.alpha - 1.0) / (2.0 - self.alpha)

    def lowered(self) -> ABParams:
        """Parameters of order :math:`\\alpha - 1` for the higher-order forms."""
        self.require_higher_order()
        return ABParams(self.alpha - 1.0, self.b_of_alpha)

    def require_first_order(self) -> None:
        if not 0 < self.alpha < 0.5:
            raise DomainError(
                f"discrete AB operators need 0 < alpha < 1/2: got {self.alpha}"
            )

    def require_higher_order(self) -> None:
        if not 1 < self.alpha < 1.5:
            raise DomainError(
                f"higher-order discrete AB forms need 1 < alpha < 3/2: got {self.alpha}"
            )


def kernel_table(p: ABParams, n_max: int) -> np.ndarray:
    r"""Kernel values :math:`E_{\overline{\alpha}}(\lambda, n)`, :math:`n = 0, \dots, n_{max}`.

    Tables are cached per ``(alpha, n_max)`` and read-only.
    """
    p.require_first_order()
    return ml_kernel_values(p.alpha, p.lam, n_max)


# {{{ generalized E-operators


def gen_e_left(f: GridFn, p: ABParams) -> GridFn:
    r"""Discrete left generalized integral

    .. math::

        \mathbf{E}_{a^+} f(t) = \sum_{s=a+1}^t E_{\overline{\alpha}}(\lambda, t-\rho(s))\, f(s),

    on the full grid, with the empty sum 0 at :math:`t = a`.
    """
    n = f.grid.size
    e = kernel_table(p, n)
    out = np.zeros(n)
    out[1:] = np.convolve(f.values[1:], e[1:n])[: n - 1]
    return GridFn(f.grid, out)


def gen_e_right(f: GridFn, p: ABParams) -> GridFn:
    r"""Discrete right generalized integral

    .. math::

        \mathbf{E}_{b^-} f(t) = \sum_{s=t}^{b-1} E_{\overline{\alpha}}(\lambda, s-\rho(t))\, f(s),

    on the full grid, with the empty sum 0 at :math:`t = b`.
    """
    n = f.grid.size
    e = kernel_table(p, n)
    out = np.zeros(n)
    out[:-1] = np.convolve(f.values[-2::-1], e[1:n])[: n - 1][::-1]
    return GridFn(f.grid, out)


# }}}


# {{{ differences and sums


def abr_diff_left(f: GridFn, p: ABParams) -> GridFn:
    """Left ABR difference on :math:`\\{a+1, \\dots, b\\}`."""
    return p.scale * nabla(gen_e_left(f, p))


def abr_diff_right(f: GridFn, p: ABParams) -> GridFn:
    """Right ABR difference on :math:`\\{a, \\dots, b-1\\}`."""
    return -p.scale * delta(gen_e_right(f, p))


def abc_diff_left(f: GridFn, p: ABParams) -> GridFn:
    """Left ABC difference on :math:`\\{a+1, \\dots, b\\}`."""
    # slot a is the unread base point of the left operator
    g = gen_e_left(pad_left(nabla(f)), p)
    return p.scale * g.restrict(f.grid.a + 1, f.grid.b)


def abc_diff_right(f: GridFn, p: ABParams) -> GridFn:
    """Right ABC difference on :math:`\\{a, \\dots, b-1\\}`."""
    g = gen_e_right(pad_right(delta(f)), p)
    return -p.scale * g.restrict(f.grid.a, f.grid.b - 1)


def ab_sum_left(f: GridFn, p: ABParams) -> GridFn:
    r"""Left AB sum :math:`\frac{1-\alpha}{B} f + \frac{\alpha}{B}\,{}_a\nabla^{-\alpha} f` on :math:`\{a+1, \dots, b\}`."""
    p.require_first_order()
    a, b = f.grid.a, f.grid.b
    frac = nabla_sum_left(f, p.alpha)
    return ((1 - p.alpha) * f.restrict(a + 1, b) + p.alpha * frac) / p.b_of_alpha


def ab_sum_right(f: GridFn, p: ABParams) -> GridFn:
    r"""Right AB sum on :math:`\{a, \dots, b-1\}`."""
    p.require_first_order()
    a, b = f.grid.a, f.grid.b
    frac = nabla_sum_right(f, p.alpha)
    return ((1 - p.alpha) * f.restrict(a, b - 1) + p.alpha * frac) / p.b_of_alpha


def abc_from_abr_left(f: GridFn, p: ABParams) -> GridFn:
    """Left ABC difference rebuilt from the ABR one and the value :math:`f(a)`."""
    r = abr_diff_left(f, p)
    e = kernel_table(p, f.grid.size)
    return r - f.values[0] * p.scale * GridFn(r.grid, e[1 : f.grid.size])


def abc_from_abr_right(f: GridFn, p: ABParams) -> GridFn:
    """Right ABC difference rebuilt from the ABR one and the value :math:`f(b)`."""
    r = abr_diff_right(f, p)
    e = kernel_table(p, f.grid.size)
    return r - f.values[-1] * p.scale * GridFn(r.grid, e[f.grid.size - 1 : 0 : -1])


# }}}


# {{{ summation by parts


def ibp_scale(f: GridFn, g: GridFn) -> float:
    """Magnitude scale :math:`\\|f\\|_\\infty \\|g\\|_\\infty (b-a)` for IBP residuals."""
    grid = common_grid(f, g)
    return f.norm_inf() * g.norm_inf() * (grid.b - grid.a)


def _interior_dot(u: GridFn, v: GridFn, a: int, b: int) -> float:
    return float(np.dot(u.restrict(a, b).values, v.restrict(a, b).values))


def _same_grid(f: GridFn, g: GridFn) -> Grid:
    if f.grid != g.grid:
        raise ValueError(f"IBP checks need a shared grid: {f.grid} vs {g.grid}")
    if f.grid.b - f.grid.a < 2:
        raise ValueError("IBP checks need a nonempty interior")
    return f.grid


def ibp_abr_sums_check(f: GridFn, g: GridFn, p: ABParams) -> float:
    """Residual of summation by parts for the AB sums over the interior."""
    grid = _same_grid(f, g)
    a, b = grid.a + 1, grid.b - 1
    lhs = _interior_dot(g, ab_sum_left(f, p), a, b)
    rhs = _interior_dot(f, ab_sum_right(g, p), a, b)
    return abs(lhs - rhs)


def ibp_abr_diff_check(f: GridFn, g: GridFn, p: ABParams) -> float:
    """Residual of summation by parts for the ABR differences over the interior."""
    grid = _same_grid(f, g)
    a, b = grid.a + 1, grid.b - 1
    lhs = _interior_dot(f, abr_diff_left(g, p), a, b)
    rhs = _interior_dot(g, abr_diff_right(f, p), a, b)
    return abs(lhs - rhs)


def ibp_abc_left_check(f: GridFn, g: GridFn, p: ABParams) -> float:
    r"""Residual of summation by parts for the left ABC difference

    .. math::

        \sum_{s=a+1}^{b-1} f(s)\, {}^{ABC}_a\nabla^\alpha g(s)
        = \sum_{s=a+1}^{b-1} g(s-1)\, {}^{ABR}\nabla_b^\alpha f(s-1)
          + \frac{B(\alpha)}{1-\alpha}\, g(t)\, \mathbf{E}_{b^-} f(t) \Big|_{a}^{b-1}.
    """
    grid = _same_grid(f, g)
    a, b = grid.a, grid.b
    lhs = _interior_dot(f, abc_diff_left(g, p), a + 1, b - 1)
    shifted = _interior_dot(g, abr_diff_right(f, p), a, b - 2)
    ef = gen_e_right(f, p)
    boundary = p.scale * (g(b - 1) * ef(b - 1) - g(a) * ef(a))
    return abs(lhs - shifted - boundary)


def swap_check(f: GridFn, g: GridFn, p: ABParams) -> float:
    """Residual of exchanging the generalized integrals between two factors."""
    grid = _same_grid(f, g)
    a, b = grid.a + 1, grid.b - 1
    lhs = _interior_dot(f, gen_e_left(g, p), a, b)
    rhs = _interior_dot(g, gen_e_right(f, p), a, b)
    return abs(lhs - rhs)


# }}}


# {{{ higher order


class HigherOrderForm(enum.Enum):
    ABC_LEFT = "abc_left"
    ABR_LEFT = "abr_left"
    ABC_RIGHT = "abc_right"
    ABR_RIGHT = "abr_right"


def _gen_e_dense(f: GridFn, alpha: float, lam: float, *, left: bool) -> GridFn:
    # double loop with kernel values from the power series, independent of
    # the convolution and recurrence used by gen_e_left/gen_e_right
    n = f.grid.size
    e = [discrete_ml(DiscreteMLArgs(alpha, 1.0, lam, m)) for m in range(n + 1)]
    out = np.zeros(n)
    for i in range(n):
        if left:
            out[i] = sum(e[i - j + 1] * f.values[j] for j in range(1, i + 1))
        else:
            out[i] = sum(e[j - i + 1] * f.values[j] for j in range(i, n - 1))
    return GridFn(f.grid, out)


def higher_order_forms(
    f: GridFn, p: ABParams, which: HigherOrderForm | str
) -> tuple[GridFn, GridFn]:
    r"""Both sides of a higher-order identity, each computed on its own.

    With :math:`\beta = \alpha - 1` and :math:`c = B(\alpha-1)/(2-\alpha)`:

    ========== ================================================ ==================================
    which      first form                                       second form
    ========== ================================================ ==================================
    abc_left   :math:`{}^{ABC}\nabla^\beta(\nabla f)`             :math:`c\,\mathbf{E}^+(\nabla^2 f)`
    abr_left   :math:`{}^{ABR}\nabla^\beta(\nabla f)`             :math:`c\,\nabla\mathbf{E}^+(\nabla f)`
    abc_right  :math:`{}^{ABC}\nabla_b^\beta(-\Delta f)`          :math:`c\,\mathbf{E}^-(\Delta^2 f)`
    abr_right  :math:`{}^{ABR}\nabla_b^\beta(-\Delta f)`          :math:`c\,\Delta\mathbf{E}^-(\Delta f)`
    ========== ================================================ ==================================

    :math:`\nabla f` lives on :math:`\{a+1, \dots, b\}`, so the left operators
    of order :math:`\beta` are based at :math:`a+1`; likewise the right ones
    end at :math:`b-1`. The kernels of the second form use
    :math:`\lambda_\beta = -\beta/(1-\beta)`.
    """
    p.require_higher_order()
    which = HigherOrderForm(which)
    q = p.lowered()
    c = q.scale
    lam = p.lam_beta

    if which is HigherOrderForm.ABC_LEFT:
        df = nabla(f)
        first = abc_diff_left(df, q)
        second = c * _gen_e_dense(pad_left(nabla(df)), q.alpha, lam, left=True)
        second = second.restrict_to(first.grid)
    elif which is HigherOrderForm.ABR_LEFT:
        df = nabla(f)
        first = abr_diff_left(df, q)
        second = c * nabla(_gen_e_dense(df, q.alpha, lam, left=True))
    elif which is HigherOrderForm.ABC_RIGHT:
        mdf = -delta(f)
        first = abc_diff_right(mdf, q)
        second = c * _gen_e_dense(pad_right(delta(delta(f))), q.alpha, lam, left=False)
        second = second.restrict_to(first.grid)
    else:
        mdf = -delta(f)
        first = abr_diff_right(mdf, q)
        second = c * delta(_gen_e_dense(delta(f), q.alpha, lam, left=False))
    return first, second


# }}}
