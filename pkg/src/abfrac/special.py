"""Mittag-Leffler functions of one, two and three parameters (real argument)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain on which a function is defined."""


class ConvergenceError(RuntimeError):
    """A series did not satisfy its stopping rule within the term budget."""


@dataclass(frozen=True)
class MLTruncation:
    """Stopping policy for the Mittag-Leffler power series.

    A partial sum is accepted at index ``k`` once ``k >= min_terms`` and the
    last included term satisfies ``|term| <= rel_tol * |sum|``.
    """

    rel_tol: float = 1e-15
    max_terms: int = 10_000
    min_terms: int = 8

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive: {self.rel_tol}")
        if not self.max_terms >= self.min_terms >= 1:
            raise ValueError(
                f"need max_terms >= min_terms >= 1: {self.max_terms}, {self.min_terms}"
            )


DEFAULT_TRUNCATION = MLTruncation()

#: Tolerated ratio between the largest term and the partial sum before the
#: double-precision sum is considered spoiled by cancellation.
CANCELLATION_RATIO = 16.0


@dataclass(frozen=True)
class MLArgs:
    """Arguments of the three-parameter function :math:`E^\\rho_{\\alpha,\\beta}(z)`."""

    alpha: float
    beta: float
    rho: float
    z: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0 and self.rho > 0):
            raise DomainError(
                f"need alpha, beta, rho > 0: got {self.alpha}, {self.beta}, {self.rho}"
            )


def log_gamma(x: float) -> float:
    r"""Return :math:`\ln\Gamma(x)` for :math:`x > 0`."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _series_double(
    alpha: float, beta: float, z: float, rho: float | None, trunc: MLTruncation
) -> tuple[float, float, int]:
    """Sum the series in double precision.

    Returns ``(sum, max_abs_term, n_terms)``; ``sum`` is ``nan`` when a term
    overflowed.
    """
    term = math.exp(-math.lgamma(beta))
    total = term
    biggest = abs(term)
    prev_lg = math.lgamma(beta)
    for k in range(1, trunc.max_terms):
        lg = math.lgamma(alpha * k + beta)
        ratio = z * math.exp(prev_lg - lg)
        if rho is not None:
            ratio *= (rho + k - 1) / k
        term *= ratio
        prev_lg = lg
        if not math.isfinite(term):
            return math.nan, math.inf, k
        total += term
        biggest = max(biggest, abs(term))
        if k >= trunc.min_terms and abs(term) <= trunc.rel_tol * abs(total):
            return total, biggest, k + 1
    raise ConvergenceError(
        f"Mittag-Leffler series (alpha={alpha}, beta={beta}, z={z}) did not "
        f"converge in {trunc.max_terms} terms"
    )


def _log10_peak_term(alpha: float, beta: float, z: float, rho: float | None) -> float:
    """Estimate log10 of the largest series term without forming it."""
    logz = math.log(abs(z))
    best = -math.lgamma(beta)
    acc = 0.0
    k = 1
    while True:
        if rho is not None:
            acc += math.log((rho + k - 1) / k)
        cur = k * logz + acc - math.lgamma(alpha * k + beta)
        if cur > best:
            best = cur
        elif k > 4 and cur < best - 50:
            return best / math.log(10)
        k += 1


def _series_mp(
    alpha: float, beta: float, z: float, rho: float | None, trunc: MLTruncation, dps: int
) -> float:
    with mpmath.workdps(dps):
        a, b, x = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
        r = None if rho is None else mpmath.mpf(rho)
        term = mpmath.rgamma(b)
        total = term
        for k in range(1, trunc.max_terms):
            term = term * x * mpmath.gamma(a * (k - 1) + b) * mpmath.rgamma(a * k + b)
            if r is not None:
                term = term * (r + k - 1) / k
            total += term
            if k >= trunc.min_terms and abs(term) <= trunc.rel_tol * 1e-5 * abs(total):
                return float(total)
    raise ConvergenceError(
        f"Mittag-Leffler series (alpha={alpha}, beta={beta}, z={z}) did not "
        f"converge in {trunc.max_terms} terms"
    )


def _ml_series(
    alpha: float, beta: float, z: float, rho: float | None, trunc: MLTruncation
) -> float:
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"need alpha > 0 and beta > 0: got {alpha}, {beta}")
    if rho is not None and not rho > 0:
        raise DomainError(f"need rho > 0: got {rho}")
    if z == 0:
        return math.exp(-math.lgamma(beta))

    total, biggest, _ = _series_double(alpha, beta, z, rho, trunc)
    if math.isfinite(total) and biggest <= CANCELLATION_RATIO * abs(total):
        return total

    # heavy cancellation (z << 0) or overflow: redo with enough digits to
    # absorb the peak term, then check the result kept ~20 significant digits
    peak = _log10_peak_term(alpha, beta, z, rho)
    dps = int(peak) + 30
    for _ in range(4):
        value = _series_mp(alpha, beta, z, rho, trunc, dps)
        if value != 0 and peak - math.log10(abs(value)) < dps - 20:
            return value
        dps *= 2
    return value


def ml_two(
    alpha: float, beta: float, z: float, trunc: MLTruncation = DEFAULT_TRUNCATION
) -> float:
    r"""Two-parameter Mittag-Leffler function

    .. math::

        E_{\alpha,\beta}(z) = \sum_{k=0}^\infty \frac{z^k}{\Gamma(\alpha k + \beta)}.
    """
    return _ml_series(alpha, beta, z, None, trunc)


def ml_one(alpha: float, z: float, trunc: MLTruncation = DEFAULT_TRUNCATION) -> float:
    r"""One-parameter Mittag-Leffler function :math:`E_\alpha(z) = E_{\alpha,1}(z)`."""
    return ml_two(alpha, 1.0, z, trunc)


def ml_three(args: MLArgs, trunc: MLTruncation = DEFAULT_TRUNCATION) -> float:
    r"""Three-parameter (Prabhakar) Mittag-Leffler function

    .. math::

        E^\rho_{\alpha,\beta}(z) = \sum_{k=0}^\infty
            \frac{(\rho)_k z^k}{k!\,\Gamma(\alpha k + \beta)}.

    The Pochhammer factor enters the term recurrence as :math:`(\rho + k - 1)/k`,
    so for :math:`\rho = 1` every term coincides with :func:`ml_two`.
    """
    return _ml_series(args.alpha, args.beta, args.z, args.rho, trunc)


def mittag_leffler(
    alpha: float,
    beta: float,
    z: np.ndarray | float,
    trunc: MLTruncation = DEFAULT_TRUNCATION,
) -> np.ndarray:
    """Vectorized :func:`ml_two` over an array of real arguments.

    All entries share one term recurrence; entries whose sum suffers from
    cancellation are recomputed individually through :func:`ml_two`.
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"need alpha > 0 and beta > 0: got {alpha}, {beta}")
    z = np.asarray(z, dtype=np.float64)
    flat = z.ravel()

    term = np.full(flat.shape, math.exp(-math.lgamma(beta)))
    total = term.copy()
    biggest = np.abs(term)
    active = flat != 0
    prev_lg = math.lgamma(beta)
    k = 1
    with np.errstate(over="ignore", invalid="ignore"):
        while np.any(active):
            if k >= trunc.max_terms:
                raise ConvergenceError(
                    f"vectorized Mittag-Leffler series did not converge in "
                    f"{trunc.max_terms} terms"
                )
            lg = math.lgamma(alpha * k + beta)
            term = np.where(active, term * flat * math.exp(prev_lg - lg), 0.0)
            prev_lg = lg
            total += term
            biggest = np.maximum(biggest, np.abs(term))
            if k >= trunc.min_terms:
                active &= ~(np.abs(term) <= trunc.rel_tol * np.abs(total))
            k += 1

    bad = ~np.isfinite(total) | (biggest > CANCELLATION_RATIO * np.abs(total))
    for i in np.flatnonzero(bad):
        total[i] = ml_two(alpha, beta, float(flat[i]), trunc)
    return total.reshape(z.shape)
