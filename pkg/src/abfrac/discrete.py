"""Nabla discrete calculus on integer grids.

Functions live on :math:`\\mathbb{N}_{a,b} = \\{a, a+1, \\dots, b\\}`. Operators
that shrink the domain return the shrunk grid instead of padding it, and the
explicit :func:`pad_left`/:func:`pad_right` helpers insert the empty-sum
value when a definition needs it.
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from abfrac.special import (
    DEFAULT_TRUNCATION,
    CANCELLATION_RATIO,
    ConvergenceError,
    DomainError,
    MLTruncation,
)


class GridMismatchError(ValueError):
    """Two grid functions were combined over different grids."""


# {{{ grids


@dataclass(frozen=True)
class Grid:
    """The integer grid :math:`\\{a, \\dots, b\\}`."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if int(self.a) != self.a or int(self.b) != self.b:
            raise ValueError(f"grid endpoints must be integers: {self.a}, {self.b}")
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        if self.b < self.a:
            raise ValueError(f"empty grid: a={self.a} > b={self.b}")

    @classmethod
    def parse(cls, text: str) -> Grid:
        """Parse ``"a:b"``."""
        try:
            a, b = text.split(":")
            return cls(int(a), int(b))
        except ValueError as exc:
            raise ValueError(f"grid must look like 'a:b', got {text!r}") from exc

    @property
    def size(self) -> int:
        return self.b - self.a + 1

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.a, self.b + 1)

    @property
    def interior(self) -> Grid:
        return Grid(self.a + 1, self.b - 1)

    def index(self, t: int) -> int:
        if not self.a <= t <= self.b:
            raise IndexError(f"t={t} outside grid [{self.a}, {self.b}]")
        return t - self.a

    @staticmethod
    def rho(t: int) -> int:
        """Backward jump :math:`\\rho(t) = t - 1`."""
        return t - 1

    @staticmethod
    def sigma(t: int) -> int:
        """Forward jump :math:`\\sigma(t) = t + 1`."""
        return t + 1

    def __contains__(self, t: object) -> bool:
        return isinstance(t, (int, np.integer)) and self.a <= t <= self.b


@dataclass(frozen=True)
class GridFn:
    """A real-valued function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} values for grid [{self.grid.a}, "
                f"{self.grid.b}], got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: Grid, f: Callable[[np.ndarray], np.ndarray]) -> GridFn:
        return cls(grid, np.broadcast_to(f(grid.t.astype(np.float64)), (grid.size,)))

    @classmethod
    def zeros(cls, grid: Grid) -> GridFn:
        return cls(grid, np.zeros(grid.size))

    @classmethod
    def impulse(cls, grid: Grid, t: int) -> GridFn:
        values = np.zeros(grid.size)
        values[grid.index(t)] = 1.0
        return cls(grid, values)

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    def __call__(self, t: int) -> float:
        return float(self.values[self.grid.index(t)])

    def __len__(self) -> int:
        return self.grid.size

    def restrict(self, a: int, b: int) -> GridFn:
        """Restrict to the sub-grid :math:`\\{a, \\dots, b\\}`."""
        sub = Grid(a, b)
        if not (self.grid.a <= sub.a and sub.b <= self.grid.b):
            raise ValueError(
                f"[{a}, {b}] is not inside [{self.grid.a}, {self.grid.b}]"
            )
        return GridFn(sub, self.values[sub.a - self.grid.a : sub.b - self.grid.a + 1])

    def restrict_to(self, grid: Grid) -> GridFn:
        return self.restrict(grid.a, grid.b)

    def _other(self, other: GridFn | float) -> np.ndarray | float:
        if isinstance(other, GridFn):
            if other.grid != self.grid:
                raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")
            return other.values
        return float(other)

    def __add__(self, other: GridFn | float) -> GridFn:
        return GridFn(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other: GridFn | float) -> GridFn:
        return GridFn(self.grid, self.values - self._other(other))

    def __rsub__(self, other: float) -> GridFn:
        return GridFn(self.grid, float(other) - self.values)

    def __mul__(self, other: GridFn | float) -> GridFn:
        return GridFn(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self) -> GridFn:
        return GridFn(self.grid, -self.values)

    def __truediv__(self, other: float) -> GridFn:
        return GridFn(self.grid, self.values / float(other))

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.values)))


def common_grid(*fns: GridFn) -> Grid:
    """Intersection of the grids of *fns*."""
    a = max(f.grid.a for f in fns)
    b = min(f.grid.b for f in fns)
    return Grid(a, b)


def pad_left(f: GridFn, value: float = 0.0) -> GridFn:
    """Extend *f* by one point on the left holding *value*.

    The default 0 is the empty-sum value of a left sum at its base point.
    """
    return GridFn(Grid(f.grid.a - 1, f.grid.b), np.concatenate([[value], f.values]))


def pad_right(f: GridFn, value: float = 0.0) -> GridFn:
    """Extend *f* by one point on the right holding *value*."""
    return GridFn(Grid(f.grid.a, f.grid.b + 1), np.concatenate([f.values, [value]]))


# }}}


# {{{ rising factorial


def _gamma_sign(x: float) -> float:
    if x > 0:
        return 1.0
    return -1.0 if math.floor(-x) % 2 == 0 else 1.0


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def rising(t: float, alpha: float) -> float:
    r"""Rising function :math:`t^{\overline{\alpha}} = \Gamma(t+\alpha)/\Gamma(t)`.

    Uses the conventions :math:`t^{\overline{0}} = 1` and
    :math:`0^{\overline{\alpha}} = 0`. When :math:`t` is a negative integer the
    quotient is read as the limit of the two poles, which exists only when
    :math:`t + \alpha` is also a non-positive integer.
    """
    if alpha == 0:
        return 1.0
    if t == 0:
        return 0.0

    if _is_nonpositive_int(t):
        if not _is_nonpositive_int(t + alpha):
            raise DomainError(
                f"rising({t}, {alpha}): Gamma(t) has a pole and Gamma(t+alpha) does not"
            )
        n, m = int(-t), int(-(t + alpha))
        if n <= 170:
            return (-1.0) ** (n - m) * (math.factorial(n) / math.factorial(m))
        return (-1.0) ** (n - m) * math.exp(math.lgamma(n + 1) - math.lgamma(m + 1))

    if _is_nonpositive_int(t + alpha):
        raise DomainError(f"rising({t}, {alpha}): Gamma(t+alpha) has a pole")

    if t == int(t) and alpha == int(alpha) and 0 < alpha and t + alpha <= 171:
        return float(math.prod(range(int(t), int(t + alpha))))

    sign = _gamma_sign(t + alpha) * _gamma_sign(t)
    return sign * math.exp(math.lgamma(t + alpha) - math.lgamma(t))


@lru_cache(maxsize=256)
def _sum_kernel(alpha: float, n: int) -> np.ndarray:
    # k[j] = (j+1)^{overline{alpha-1}} / Gamma(alpha), built by its product
    # recurrence so no Gamma value is ever formed
    k = np.empty(n)
    if n:
        k[0] = 1.0
        m = np.arange(1, n - 1 + 1, dtype=np.float64)
        k[1:] = np.cumprod((m + alpha - 1.0) / m)
    k.flags.writeable = False
    return k


def sum_kernel(alpha: float, n: int) -> np.ndarray:
    r"""First *n* weights :math:`m^{\overline{\alpha-1}}/\Gamma(\alpha)`, :math:`m = 1, \dots, n`."""
    if not alpha > 0:
        raise DomainError(f"fractional sum order must be positive: {alpha}")
    return _sum_kernel(float(alpha), int(n))


# }}}


# {{{ integer-order differences


def nabla(f: GridFn) -> GridFn:
    r"""Backward difference :math:`\nabla f(t) = f(t) - f(t-1)` on :math:`\{a+1, \dots, b\}`."""
    return GridFn(Grid(f.grid.a + 1, f.grid.b), np.diff(f.values))


def delta(f: GridFn) -> GridFn:
    r"""Forward difference :math:`\Delta f(t) = f(t+1) - f(t)` on :math:`\{a, \dots, b-1\}`."""
    return GridFn(Grid(f.grid.a, f.grid.b - 1), np.diff(f.values))


def q_reflect(f: GridFn, about: Grid | None = None) -> GridFn:
    r"""Reflection :math:`(Qf)(t) = f(a+b-t)`.

    By default :math:`a, b` are the endpoints of ``f.grid``, so the grid is
    unchanged. Passing *about* reflects through a parent grid instead, which
    maps a sub-grid :math:`\{c, \dots, d\}` to :math:`\{a+b-d, \dots, a+b-c\}`.
    """
    about = f.grid if about is None else about
    s = about.a + about.b
    return GridFn(Grid(s - f.grid.b, s - f.grid.a), f.values[::-1])


# }}}


# {{{ fractional sums and differences


def _left_conv(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """``out[i] = sum_{j<=i} kernel[i-j] * values[j]``."""
    n = values.shape[-1]
    return np.convolve(values, kernel[:n])[:n]


def nabla_sum_left(f: GridFn, alpha: float) -> GridFn:
    r"""Nabla left fractional sum based at :math:`a`

    .. math::

        {}_a\nabla^{-\alpha} f(t) = \frac{1}{\Gamma(\alpha)}
            \sum_{s=a+1}^t (t - \rho(s))^{\overline{\alpha-1}} f(s),
        \qquad t \in \{a+1, \dots, b\}.

    The value :math:`f(a)` is never read.
    """
    a, b = f.grid.a, f.grid.b
    if b == a:
        raise ValueError("a left sum needs at least one point after its base")
    k = sum_kernel(alpha, b - a)
    return GridFn(Grid(a + 1, b), _left_conv(f.values[1:], k))


def nabla_sum_right(f: GridFn, alpha: float) -> GridFn:
    r"""Nabla right fractional sum ending at :math:`b`

    .. math::

        \nabla_b^{-\alpha} f(t) = \frac{1}{\Gamma(\alpha)}
            \sum_{s=t}^{b-1} (s - \rho(t))^{\overline{\alpha-1}} f(s),
        \qquad t \in \{a, \dots, b-1\}.

    The value :math:`f(b)` is never read.
    """
    a, b = f.grid.a, f.grid.b
    if b == a:
        raise ValueError("a right sum needs at least one point before its end")
    k = sum_kernel(alpha, b - a)
    return GridFn(Grid(a, b - 1), _left_conv(f.values[-2::-1], k)[::-1])


def _check_unit_order(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError(f"difference order must lie in (0, 1): {alpha}")


def rl_diff_left(f: GridFn, alpha: float) -> GridFn:
    """Nabla left Riemann-Liouville difference on :math:`\\{a+1, \\dots, b\\}`."""
    _check_unit_order(alpha)
    return nabla(pad_left(nabla_sum_left(f, 1 - alpha)))


def rl_diff_right(f: GridFn, alpha: float) -> GridFn:
    """Nabla right Riemann-Liouville difference on :math:`\\{a, \\dots, b-1\\}`."""
    _check_unit_order(alpha)
    return -delta(pad_right(nabla_sum_right(f, 1 - alpha)))


def caputo_diff_left(f: GridFn, alpha: float) -> GridFn:
    """Nabla left Caputo difference on :math:`\\{a+1, \\dots, b\\}`."""
    _check_unit_order(alpha)
    # the slot at a is the (unread) base point of the sum
    return nabla_sum_left(pad_left(nabla(f)), 1 - alpha)


def caputo_diff_right(f: GridFn, alpha: float) -> GridFn:
    """Nabla right Caputo difference on :math:`\\{a, \\dots, b-1\\}`."""
    _check_unit_order(alpha)
    return nabla_sum_right(pad_right(-delta(f)), 1 - alpha)


# }}}


# {{{ discrete Mittag-Leffler


@dataclass(frozen=True)
class DiscreteMLArgs:
    r"""Arguments of :math:`E_{\overline{\alpha,\beta}}(\lambda, z)`."""

    alpha: float
    beta: float
    lam: float
    z: int

    def __post_init__(self) -> None:
        if not abs(self.lam) < 1:
            raise DomainError(f"need |lam| < 1: got {self.lam}")
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f"need alpha, beta > 0: got {self.alpha}, {self.beta}")
        if int(self.z) != self.z or self.z < 0:
            raise DomainError(f"z must be a non-negative integer: {self.z}")
        object.__setattr__(self, "z", int(self.z))


def _dml_double(
    alpha: float, beta: float, rho: float | None, lam: float, z: int, trunc: MLTruncation
) -> tuple[float, float]:
    # term_k = lam^k (rho)_k/k! Gamma(z + k alpha + beta - 1) / (Gamma(z) Gamma(k alpha + beta))
    def log_mag(k: int) -> float:
        x = k * alpha + beta
        return math.lgamma(z + x - 1) - math.lgamma(z) - math.lgamma(x)

    prev = log_mag(0)
    term = math.exp(prev)
    total = term
    biggest = abs(term)
    for k in range(1, trunc.max_terms):
        cur = log_mag(k)
        step = lam * math.exp(cur - prev)
        if rho is not None:
            step *= (rho + k - 1) / k
        term *= step
        prev = cur
        if not math.isfinite(term):
            return math.nan, math.inf
        total += term
        biggest = max(biggest, abs(term))
        if k >= trunc.min_terms and abs(term) <= trunc.rel_tol * abs(total):
            return total, biggest
    raise ConvergenceError(
        f"discrete Mittag-Leffler series (alpha={alpha}, beta={beta}, lam={lam}, "
        f"z={z}) did not converge in {trunc.max_terms} terms"
    )


def _dml_peak_terms(
    alpha: float, beta: float, rho: float | None, lam: float, z: int, limit: int
) -> tuple[float, int]:
    """Return (log10 of the largest term, index where terms drop below 1e-40 of it)."""
    loglam = math.log(abs(lam))
    best = -math.inf
    acc = 0.0
    for k in range(limit):
        if rho is not None and k > 0:
            acc += math.log((rho + k - 1) / k)
        x = k * alpha + beta
        cur = k * loglam + acc + math.lgamma(z + x - 1) - math.lgamma(z) - math.lgamma(x)
        best = max(best, cur)
        if cur < best - 92 and k > 4:
            return best / math.log(10), k
    return best / math.log(10), limit


def _dml_mp(
    alpha: float, beta: float, rho: float | None, lam: float, z: int, trunc: MLTruncation, dps: int
) -> float:
    with mpmath.workdps(dps):
        a, b, lm = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(lam)
        zz = mpmath.mpf(z)
        r = None if rho is None else mpmath.mpf(rho)
        term = mpmath.rf(zz, b - 1) / mpmath.gamma(b)
        total = term
        for k in range(1, trunc.max_terms):
            term = (
                term
                * lm
                * mpmath.rf(zz + (k - 1) * a + b - 1, a)
                * mpmath.gamma((k - 1) * a + b)
                / mpmath.gamma(k * a + b)
            )
            if r is not None:
                term = term * (r + k - 1) / k
            total += term
            if k >= trunc.min_terms and abs(term) <= trunc.rel_tol * 1e-5 * abs(total):
                return float(total)
    raise ConvergenceError(
        f"discrete Mittag-Leffler series (alpha={alpha}, beta={beta}, lam={lam}, "
        f"z={z}) did not converge in {trunc.max_terms} terms"
    )


def ml_kernel_values(alpha: float, lam: float, n_max: int) -> np.ndarray:
    r"""Values :math:`E_{\overline{\alpha}}(\lambda, n)` for :math:`n = 0, \dots, n_{max}`.

    Computed from the fact that :math:`y(n) = E_{\overline{\alpha}}(\lambda, n)`
    solves the Caputo problem :math:`{}^C_0\nabla^\alpha y = \lambda y`,
    :math:`y(0) = 1`. Writing that equation at :math:`t` and isolating
    :math:`y(t)` gives the exact recurrence

    .. math::

        (1 - \lambda)\, y(t) = y(t-1) - \sum_{s=1}^{t-1} k(t-s+1)\,\nabla y(s),

    with :math:`k` the weights of the sum of order :math:`1-\alpha`. The cost is
    :math:`O(n^2)` and no cancellation occurs, unlike the power series at
    large :math:`n`. Requires :math:`0 < \alpha < 1`.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"kernel recurrence needs 0 < alpha < 1: got {alpha}")
    if not abs(lam) < 1:
        raise DomainError(f"need |lam| < 1: got {lam}")
    return _ml_kernel_values(float(alpha), float(lam), int(n_max))


@lru_cache(maxsize=128)
def _ml_kernel_values(alpha: float, lam: float, n_max: int) -> np.ndarray:
    k = sum_kernel(1 - alpha, n_max + 1)
    y = np.empty(n_max + 1)
    dy = np.zeros(n_max + 1)
    y[0] = 1.0
    for t in range(1, n_max + 1):
        # k[j] is the weight at distance j+1, so k(t-s+1) = k[t-s]
        acc = np.dot(k[t - 1 : 0 : -1], dy[1:t]) if t > 1 else 0.0
        y[t] = (y[t - 1] - acc) / (1 - lam)
        dy[t] = y[t] - y[t - 1]
    y.flags.writeable = False
    return y


def _discrete_ml(
    alpha: float, beta: float, rho: float | None, lam: float, z: int, trunc: MLTruncation
) -> float:
    if z == 0:
        # 0^{overline{x}} vanishes except for the exponent-zero term (k=0, beta=1)
        return 1.0 if beta == 1 else 0.0
    if lam == 0:
        return math.exp(math.lgamma(z + beta - 1) - math.lgamma(z) - math.lgamma(beta))

    peak, n_needed = _dml_peak_terms(alpha, beta, rho, lam, z, trunc.max_terms + 1)
    if n_needed <= trunc.max_terms:
        total, biggest = _dml_double(alpha, beta, rho, lam, z, trunc)
        if math.isfinite(total) and biggest <= CANCELLATION_RATIO * abs(total):
            return total
        if peak < 300:
            return _dml_mp(alpha, beta, rho, lam, z, trunc, int(peak) + 40)

    if beta == 1 and (rho is None or rho == 1) and 0 < alpha < 1:
        return float(ml_kernel_values(alpha, lam, z)[z])
    raise ConvergenceError(
        f"discrete Mittag-Leffler series (alpha={alpha}, beta={beta}, lam={lam}, "
        f"z={z}) needs about {n_needed} terms with peak 1e{peak:.0f}; "
        f"only the beta=1 recurrence can evaluate this case"
    )


def discrete_ml(args: DiscreteMLArgs, trunc: MLTruncation = DEFAULT_TRUNCATION) -> float:
    r"""Nabla discrete Mittag-Leffler function

    .. math::

        E_{\overline{\alpha,\beta}}(\lambda, z) = \sum_{k=0}^\infty \lambda^k
            \frac{z^{\overline{k\alpha+\beta-1}}}{\Gamma(\alpha k + \beta)}.

    At :math:`z = 0` every rising factorial vanishes except the
    :math:`k = 0, \beta = 1` one, whose exponent is zero; that term is taken
    as 1, so :math:`E_{\overline{\alpha}}(\lambda, 0) = 1`.

    The series is summed in double precision. If cancellation spoils it, it
    is re-summed with :mod:`mpmath`, and when it would need more than
    ``trunc.max_terms`` terms the case :math:`\beta = 1,\ 0 < \alpha < 1` is
    delegated to :func:`ml_kernel_values`.
    """
    return _discrete_ml(args.alpha, args.beta, None, args.lam, args.z, trunc)


def discrete_ml3(
    alpha: float,
    beta: float,
    rho: float,
    lam: float,
    z: int,
    trunc: MLTruncation = DEFAULT_TRUNCATION,
) -> float:
    r"""Three-parameter nabla discrete Mittag-Leffler function

    .. math::

        E^\rho_{\overline{\alpha,\beta}}(\lambda, z) = \sum_{k=0}^\infty
            \lambda^k (\rho)_k \frac{z^{\overline{k\alpha+\beta-1}}}{k!\,\Gamma(\alpha k + \beta)}.
    """
    args = DiscreteMLArgs(alpha, beta, lam, z)
    if not rho > 0:
        raise DomainError(f"need rho > 0: got {rho}")
    return _discrete_ml(args.alpha, args.beta, rho, args.lam, args.z, trunc)


# }}}


# {{{ csv


def gridfn_to_csv(f: GridFn) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for t, v in zip(f.t, f.values):
        w.writerow([int(t), repr(float(v))])
    return buf.getvalue()


def gridfn_from_csv(text: str | Iterable[str]) -> GridFn:
    """Parse the ``t,value`` format; *t* must be consecutive ascending integers."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    rows = list(csv.reader(lines))
    if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
        raise ValueError("line 1: expected header 't,value'")
    ts, vs = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            t = int(row[0])
        except ValueError:
            raise ValueError(f"line {lineno}: field 't' is not an integer: {row[0]!r}")
        try:
            v = float(row[1])
        except ValueError:
            raise ValueError(f"line {lineno}: field 'value' is not a number: {row[1]!r}")
        if not math.isfinite(v):
            raise ValueError(f"line {lineno}: field 'value' is not finite")
        if ts and t != ts[-1] + 1:
            raise ValueError(f"line {lineno}: t={t} does not follow t={ts[-1]}")
        ts.append(t)
        vs.append(v)
    if not ts:
        raise ValueError("no data rows")
    return GridFn(Grid(ts[0], ts[-1]), np.array(vs))


def read_gridfn(path: str | os.PathLike[str]) -> GridFn:
    with open(path, encoding="utf-8") as fh:
        return gridfn_from_csv(fh.read())


def write_gridfn(path: str | os.PathLike[str], f: GridFn) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(gridfn_to_csv(f))


# }}}
