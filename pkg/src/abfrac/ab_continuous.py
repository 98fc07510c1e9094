"""Continuous operators with Mittag-Leffler kernels on uniform meshes.

Every integral operator here is a product-integration rule (see
:class:`abfrac.quadrature.ProductRule`): the operand is interpolated linearly
and the kernel is integrated exactly against it, which handles the
:math:`(t-s)^\\alpha` behaviour of :math:`E_\\alpha(\\lambda (t-s)^\\alpha)` near
the diagonal. The ABR derivatives differentiate the transformed operand.
By default this derivative is taken exactly from the rule, and fourth-order
finite differences are available as ``method="fd4"``.

The identity checks integrate with the composite trapezoid rule. The
integrands contain the terms :math:`K(t-a)` or :math:`K(b-t)`, whose
:math:`|t - t_{end}|^\\alpha` endpoint behaviour would cap the observed
order at :math:`1+\\alpha`. When ``corrected=True`` these terms are split
off and integrated exactly, since :math:`\\int_a^b f(t) K(t-a)\\,dt` is the
right generalized integral of :math:`f` evaluated at :math:`a`.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
import warnings
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from abfrac.ab_discrete import ABParams
from abfrac.quadrature import (
    QuadratureRule,
    fd4_derivative,
    integrate,
    ml_product_rule,
    power_product_rule,
)
from abfrac.special import DomainError


class AccuracyWarning(UserWarning):
    """A result was computed with a lower-order fallback."""


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class DerivativeMethod(enum.Enum):
    EXACT = "exact"
    FD4 = "fd4"


# {{{ mesh functions


@dataclass(frozen=True)
class UniformMesh:
    """Uniform mesh of :math:`[a, b]` with ``n_points`` nodes."""

    a: float
    b: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.b > self.a:
            raise ValueError(f"need b > a: got a={self.a}, b={self.b}")
        if self.n_points < 3:
            raise ValueError(f"need at least 3 mesh points: got {self.n_points}")

    @classmethod
    def parse(cls, text: str) -> UniformMesh:
        """Parse ``"a:b:n"``."""
        try:
            a, b, n = text.split(":")
            return cls(float(a), float(b), int(n))
        except ValueError as exc:
            raise ValueError(f"mesh must look like 'a:b:n', got {text!r}") from exc

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n_points - 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n_points)

    def refined(self) -> UniformMesh:
        """Mesh with the step halved."""
        return UniformMesh(self.a, self.b, 2 * self.n_points - 1)


@dataclass(frozen=True)
class MeshFn:
    """Values of a function on a :class:`UniformMesh`, optionally with its derivative."""

    mesh: UniformMesh
    values: np.ndarray = field(repr=False)
    derivative_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        for name in ("values", "derivative_values"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.array(arr, dtype=np.float64)
            if arr.shape != (self.mesh.n_points,):
                raise ValueError(
                    f"{name}: expected {self.mesh.n_points} entries, got shape {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_function(
        cls,
        mesh: UniformMesh,
        f: Callable[[np.ndarray], np.ndarray],
        df: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> MeshFn:
        t = mesh.t
        values = np.broadcast_to(f(t), t.shape)
        dvalues = None if df is None else np.broadcast_to(df(t), t.shape)
        return cls(mesh, values, dvalues)

    @property
    def t(self) -> np.ndarray:
        return self.mesh.t

    @property
    def has_derivative(self) -> bool:
        return self.derivative_values is not None

    def _wrap(self, values: np.ndarray) -> MeshFn:
        return MeshFn(self.mesh, values)

    def _other(self, other: MeshFn | float) -> np.ndarray | float:
        if isinstance(other, MeshFn):
            if other.mesh != self.mesh:
                raise ValueError(f"meshes differ: {self.mesh} vs {other.mesh}")
            return other.values
        return float(other)

    def __add__(self, other: MeshFn | float) -> MeshFn:
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other: MeshFn | float) -> MeshFn:
        return self._wrap(self.values - self._other(other))

    def __mul__(self, other: MeshFn | float) -> MeshFn:
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self) -> MeshFn:
        return self._wrap(-self.values)


def q_reflect_mesh(f: MeshFn) -> MeshFn:
    """Reflection :math:`(Qf)(t) = f(a+b-t)` by value reversal."""
    d = None if f.derivative_values is None else -f.derivative_values[::-1]
    return MeshFn(f.mesh, f.values[::-1], d)


def _shared_mesh(*fns: MeshFn) -> UniformMesh:
    mesh = fns[0].mesh
    for g in fns[1:]:
        if g.mesh != mesh:
            raise ValueError(f"meshes differ: {mesh} vs {g.mesh}")
    return mesh


# }}}


# {{{ kernels


def _check_order(p: ABParams) -> None:
    if not 0 < p.alpha < 1:
        raise DomainError(f"continuous AB operators need 0 < alpha < 1: got {p.alpha}")


def _ml_rule(mesh: UniformMesh, alpha: float, omega: float):
    return ml_product_rule(float(alpha), float(omega), float(mesh.h), mesh.n_points)


def kernel_on_mesh(mesh: UniformMesh, p: ABParams) -> np.ndarray:
    r"""Samples :math:`K(t_i - a) = E_\alpha(\lambda (t_i - a)^\alpha)`."""
    return np.array(_ml_rule(mesh, p.alpha, p.lam).node_kernel)


# }}}


# {{{ integrals


def rl_integral_left(f: MeshFn, alpha: float) -> MeshFn:
    r"""Left Riemann-Liouville integral :math:`\frac{1}{\Gamma(\alpha)}\int_a^t (t-s)^{\alpha-1} f(s)\,ds`."""
    if not alpha > 0:
        raise DomainError(f"integral order must be positive: {alpha}")
    rule = power_product_rule(float(alpha), float(f.mesh.h), f.mesh.n_points)
    return MeshFn(f.mesh, rule.transform_left(f.values))


def rl_integral_right(f: MeshFn, alpha: float) -> MeshFn:
    r"""Right Riemann-Liouville integral :math:`\frac{1}{\Gamma(\alpha)}\int_t^b (s-t)^{\alpha-1} f(s)\,ds`."""
    if not alpha > 0:
        raise DomainError(f"integral order must be positive: {alpha}")
    rule = power_product_rule(float(alpha), float(f.mesh.h), f.mesh.n_points)
    return MeshFn(f.mesh, rule.transform_right(f.values))


def gen_e_left_c(f: MeshFn, alpha: float, omega: float) -> MeshFn:
    r"""Left generalized integral :math:`\int_a^x E_\alpha(\omega (x-t)^\alpha) f(t)\,dt`."""
    if not 0 < alpha < 1:
        raise DomainError(f"need 0 < alpha < 1: got {alpha}")
    return MeshFn(f.mesh, _ml_rule(f.mesh, alpha, omega).transform_left(f.values))


def gen_e_right_c(f: MeshFn, alpha: float, omega: float) -> MeshFn:
    r"""Right generalized integral :math:`\int_x^b E_\alpha(\omega (t-x)^\alpha) f(t)\,dt`."""
    if not 0 < alpha < 1:
        raise DomainError(f"need 0 < alpha < 1: got {alpha}")
    return MeshFn(f.mesh, _ml_rule(f.mesh, alpha, omega).transform_right(f.values))


def ab_integral_left(f: MeshFn, p: ABParams) -> MeshFn:
    r"""Left AB integral :math:`\frac{1-\alpha}{B} f + \frac{\alpha}{B}\,{}_aI^\alpha f`."""
    _check_order(p)
    rl = rl_integral_left(f, p.alpha)
    return MeshFn(f.mesh, ((1 - p.alpha) * f.values + p.alpha * rl.values) / p.b_of_alpha)


def ab_integral_right(f: MeshFn, p: ABParams) -> MeshFn:
    r"""Right AB integral :math:`\frac{1-\alpha}{B} f + \frac{\alpha}{B}\,I_b^\alpha f`."""
    _check_order(p)
    rl = rl_integral_right(f, p.alpha)
    return MeshFn(f.mesh, ((1 - p.alpha) * f.values + p.alpha * rl.values) / p.b_of_alpha)


# }}}


# {{{ derivatives


def abr_deriv_left(
    f: MeshFn, p: ABParams, method: DerivativeMethod | str = DerivativeMethod.EXACT
) -> MeshFn:
    r"""Left ABR derivative :math:`\frac{B}{1-\alpha}\frac{d}{dt}\mathbf{E}_{a^+} f`."""
    _check_order(p)
    rule = _ml_rule(f.mesh, p.alpha, p.lam)
    if DerivativeMethod(method) is DerivativeMethod.FD4:
        d = fd4_derivative(rule.transform_left(f.values), f.mesh.h)
    else:
        d = rule.derivative_left(f.values)
    return MeshFn(f.mesh, p.scale * d)


def abr_deriv_right(
    f: MeshFn, p: ABParams, method: DerivativeMethod | str = DerivativeMethod.EXACT
) -> MeshFn:
    r"""Right ABR derivative :math:`-\frac{B}{1-\alpha}\frac{d}{dt}\mathbf{E}_{b^-} f`."""
    _check_order(p)
    rule = _ml_rule(f.mesh, p.alpha, p.lam)
    if DerivativeMethod(method) is DerivativeMethod.FD4:
        d = -fd4_derivative(rule.transform_right(f.values), f.mesh.h)
    else:
        d = rule.derivative_right(f.values)
    return MeshFn(f.mesh, p.scale * d)


def _warn_fallback() -> None:
    warnings.warn(
        "no analytic derivative supplied; ABC derivative uses the slopes of the "
        "piecewise-linear interpolant",
        AccuracyWarning,
        stacklevel=3,
    )


def abc_deriv_left(f: MeshFn, p: ABParams) -> MeshFn:
    r"""Left ABC derivative :math:`\frac{B}{1-\alpha}\mathbf{E}_{a^+} f'`.

    Without ``f.derivative_values`` the interpolant's slopes stand in for
    :math:`f'` and an :class:`AccuracyWarning` is issued.
    """
    _check_order(p)
    rule = _ml_rule(f.mesh, p.alpha, p.lam)
    if f.derivative_values is None:
        _warn_fallback()
        return MeshFn(f.mesh, p.scale * rule.slope_transform_left(f.values))
    return MeshFn(f.mesh, p.scale * rule.transform_left(f.derivative_values))


def abc_deriv_right(f: MeshFn, p: ABParams) -> MeshFn:
    r"""Right ABC derivative :math:`-\frac{B}{1-\alpha}\mathbf{E}_{b^-} f'`."""
    _check_order(p)
    rule = _ml_rule(f.mesh, p.alpha, p.lam)
    if f.derivative_values is None:
        _warn_fallback()
        d = -rule.slope_transform_left(f.values[::-1])[::-1]
        return MeshFn(f.mesh, p.scale * d)
    return MeshFn(f.mesh, -p.scale * rule.transform_right(f.derivative_values))


# }}}


# {{{ identity checks


def _endpoint_split_left(
    f: MeshFn, g: MeshFn, p: ABParams, rule_kind: QuadratureRule, corrected: bool
) -> float:
    r""":math:`\int f\,{}^{ABR}_aD^\alpha g` with the :math:`K(t-a)` term integrated exactly."""
    mesh = f.mesh
    dg = abr_deriv_left(g, p).values
    if not corrected:
        return integrate(f.values * dg, mesh.h, rule_kind)
    rule = _ml_rule(mesh, p.alpha, p.lam)
    w = p.scale * g.values[0]
    smooth = integrate(f.values * (dg - w * rule.node_kernel), mesh.h, rule_kind)
    return smooth + w * rule.transform_right(f.values)[0]


def _endpoint_split_right(
    f: MeshFn, g: MeshFn, p: ABParams, rule_kind: QuadratureRule, corrected: bool
) -> float:
    r""":math:`\int f\,{}^{ABR}D_b^\alpha g` with the :math:`K(b-t)` term integrated exactly."""
    mesh = f.mesh
    dg = abr_deriv_right(g, p).values
    if not corrected:
        return integrate(f.values * dg, mesh.h, rule_kind)
    rule = _ml_rule(mesh, p.alpha, p.lam)
    w = p.scale * g.values[-1]
    smooth = integrate(f.values * (dg - w * rule.node_kernel[::-1]), mesh.h, rule_kind)
    return smooth + w * rule.transform_left(f.values)[-1]


def ibp_abr_continuous_check(
    f: MeshFn,
    g: MeshFn,
    p: ABParams,
    rule: QuadratureRule = QuadratureRule.TRAPEZOID,
    corrected: bool = True,
) -> float:
    r"""Residual of :math:`\int f\,{}^{ABR}_aD^\alpha g = \int g\,{}^{ABR}D_b^\alpha f`."""
    _shared_mesh(f, g)
    lhs = _endpoint_split_left(f, g, p, rule, corrected)
    rhs = _endpoint_split_right(g, f, p, rule, corrected)
    return abs(lhs - rhs)


def ibp_abc_continuous_check(
    f: MeshFn,
    g: MeshFn,
    p: ABParams,
    side: Side | str = Side.LEFT,
    rule: QuadratureRule = QuadratureRule.TRAPEZOID,
    corrected: bool = True,
) -> float:
    r"""Residual of integration by parts for an ABC derivative.

    Left:

    .. math::

        \int g\,{}^{ABC}_aD^\alpha f = \int f\,{}^{ABR}D_b^\alpha g
            + \frac{B}{1-\alpha}\, f\,\mathbf{E}_{b^-} g \Big|_a^b.

    Right:

    .. math::

        \int g\,{}^{ABC}D_b^\alpha f = \int f\,{}^{ABR}_aD^\alpha g
            - \frac{B}{1-\alpha}\, f\,\mathbf{E}_{a^+} g \Big|_a^b.
    """
    mesh = _shared_mesh(f, g)
    erule = _ml_rule(mesh, p.alpha, p.lam)
    if Side(side) is Side.LEFT:
        lhs = integrate(g.values * abc_deriv_left(f, p).values, mesh.h, rule)
        eg = erule.transform_right(g.values)
        rhs = _endpoint_split_right(f, g, p, rule, corrected)
        rhs += p.scale * (f.values[-1] * eg[-1] - f.values[0] * eg[0])
    else:
        lhs = integrate(g.values * abc_deriv_right(f, p).values, mesh.h, rule)
        eg = erule.transform_left(g.values)
        rhs = _endpoint_split_left(f, g, p, rule, corrected)
        rhs -= p.scale * (f.values[-1] * eg[-1] - f.values[0] * eg[0])
    return abs(lhs - rhs)


def swap_identity_check(
    phi: MeshFn,
    psi: MeshFn,
    p: ABParams,
    rule: QuadratureRule = QuadratureRule.TRAPEZOID,
) -> float:
    r"""Residual of :math:`\int \varphi\,\mathbf{E}_{a^+}\psi = \int \psi\,\mathbf{E}_{b^-}\varphi`."""
    mesh = _shared_mesh(phi, psi)
    lhs = integrate(phi.values * gen_e_left_c(psi, p.alpha, p.lam).values, mesh.h, rule)
    rhs = integrate(psi.values * gen_e_right_c(phi, p.alpha, p.lam).values, mesh.h, rule)
    return abs(lhs - rhs)


def relation_residual(f: MeshFn, p: ABParams, side: Side | str = Side.LEFT) -> float:
    r"""Max-norm residual of the ABC/ABR relation on one side

    .. math::

        {}^{ABC}_aD^\alpha f = {}^{ABR}_aD^\alpha f
            - \frac{B}{1-\alpha} f(a) E_\alpha\Big(\lambda (t-a)^\alpha\Big),

    and its mirror with :math:`f(b)` and :math:`(b-t)^\alpha`.
    """
    k = kernel_on_mesh(f.mesh, p)
    if Side(side) is Side.LEFT:
        diff = abc_deriv_left(f, p).values - (
            abr_deriv_left(f, p).values - p.scale * f.values[0] * k
        )
    else:
        diff = abc_deriv_right(f, p).values - (
            abr_deriv_right(f, p).values - p.scale * f.values[-1] * k[::-1]
        )
    return float(np.max(np.abs(diff)))


class Composition(enum.Enum):
    DERIV_OF_INTEGRAL = "deriv_of_integral"
    INTEGRAL_OF_DERIV = "integral_of_deriv"


def inverse_law_residual(
    f: MeshFn,
    p: ABParams,
    side: Side | str = Side.LEFT,
    composition: Composition | str = Composition.DERIV_OF_INTEGRAL,
) -> float:
    """Discrete :math:`L^2` norm of the defect of an inverse law.

    ``deriv_of_integral`` checks that the ABR derivative undoes the AB
    integral, ``integral_of_deriv`` the reverse composition.
    """
    left = Side(side) is Side.LEFT
    deriv = abr_deriv_left if left else abr_deriv_right
    integral = ab_integral_left if left else ab_integral_right
    if Composition(composition) is Composition.DERIV_OF_INTEGRAL:
        out = deriv(integral(f, p), p)
    else:
        out = integral(deriv(f, p), p)
    e = out.values - f.values
    return math.sqrt(integrate(e * e, f.mesh.h))


# }}}


# {{{ csv


def meshfn_to_csv(f: MeshFn) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if f.derivative_values is None:
        w.writerow(["t", "value"])
        for t, v in zip(f.t, f.values):
            w.writerow([repr(float(t)), repr(float(v))])
    else:
        w.writerow(["t", "value", "dvalue"])
        for t, v, d in zip(f.t, f.values, f.derivative_values):
            w.writerow([repr(float(t)), repr(float(v)), repr(float(d))])
    return buf.getvalue()


def meshfn_from_csv(text: str) -> MeshFn:
    """Parse ``t,value[,dvalue]``; the *t* column must be uniformly spaced."""
    rows = [r for r in csv.reader(text.splitlines())]
    if not rows:
        raise ValueError("line 1: empty input")
    header = [c.strip() for c in rows[0]]
    if header not in (["t", "value"], ["t", "value", "dvalue"]):
        raise ValueError("line 1: expected header 't,value' or 't,value,dvalue'")
    width = len(header)
    cols: list[list[float]] = [[] for _ in range(width)]
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise ValueError(f"line {lineno}: expected {width} fields, got {len(row)}")
        for name, cell, col in zip(header, row, cols):
            try:
                x = float(cell)
            except ValueError:
                raise ValueError(f"line {lineno}: field {name!r} is not a number: {cell!r}")
            if not math.isfinite(x):
                raise ValueError(f"line {lineno}: field {name!r} is not finite")
            col.append(x)
    t = np.array(cols[0])
    if t.size < 3:
        raise ValueError("need at least 3 rows")
    # the first step sets the spacing, so the first off-mesh row is the one reported
    step = t[1] - t[0]
    expected = t[0] + step * np.arange(t.size)
    bad = np.flatnonzero(np.abs(t - expected) > 1e-9 * max(1.0, abs(t[-1] - t[0])))
    if bad.size:
        raise ValueError(f"line {bad[0] + 2}: t is not on a uniform mesh")
    mesh = UniformMesh(float(t[0]), float(t[-1]), int(t.size))
    d = np.array(cols[2]) if width == 3 else None
    return MeshFn(mesh, np.array(cols[1]), d)


def read_meshfn(path: str | os.PathLike[str]) -> MeshFn:
    with open(path, encoding="utf-8") as fh:
        return meshfn_from_csv(fh.read())


def write_meshfn(path: str | os.PathLike[str], f: MeshFn) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(meshfn_to_csv(f))


# }}}
