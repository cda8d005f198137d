"""Normal-model significance arithmetic.

Conversions between z and p, power of the one-sided test, balancing the
two error rates, the pair of p-values of a simple-vs-simple test, and the
central confidence interval obtained by inverting the two-tailed test.

All tail probabilities go through ``scipy.special.ndtr`` / ``log_ndtr``,
which are erfc based and keep full relative precision deep in the upper
tail; quantiles use ``ndtri``.  ``log10_p`` stays finite far beyond the
point where ``p`` underflows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

from .errors import DegenerateInputError, InvalidInputError

__all__ = [
    "Tails",
    "Measurement",
    "FrequentistResult",
    "p_from_z",
    "z_from_p",
    "power_one_sided",
    "balance_errors",
    "simple_vs_simple_pvalues",
    "ci_normal",
]

_LN10 = math.log(10.0)


class Tails(enum.Enum):
    """Tail convention of a test; HEP searches use ``ONE``."""

    ONE = "one"
    TWO = "two"

    @classmethod
    def coerce(cls, value) -> "Tails":
        if isinstance(value, cls):
            return value
        if value in (1, "1", "one"):
            return cls.ONE
        if value in (2, "2", "two"):
            return cls.TWO
        raise InvalidInputError(f"unknown tail convention {value!r}")


@dataclass(frozen=True)
class Measurement:
    """An observed effect summarised by a normal sampling distribution.

    Build it either from ``sigma_tot`` directly, or with
    :meth:`from_sample_size` which fixes ``sigma_tot = sigma / sqrt(n)``.
    """

    theta_hat: float
    sigma_tot: float
    sigma: float | None = None
    n: int | None = None

    def __post_init__(self):
        if not math.isfinite(self.theta_hat):
            raise InvalidInputError("theta_hat must be finite")
        if not (math.isfinite(self.sigma_tot) and self.sigma_tot > 0):
            raise InvalidInputError("sigma_tot must be finite and > 0")
        if self.n is not None:
            if self.sigma is None:
                raise InvalidInputError("n given without sigma")
            if int(self.n) != self.n or self.n < 1:
                raise InvalidInputError("n must be a positive integer")
            if self.sigma_tot != self.sigma / math.sqrt(self.n):
                raise InvalidInputError("sigma_tot must equal sigma / sqrt(n)")

    @classmethod
    def from_sample_size(cls, theta_hat: float, sigma: float, n: int) -> "Measurement":
        if not (math.isfinite(sigma) and sigma > 0):
            raise InvalidInputError("sigma must be finite and > 0")
        if int(n) != n or n < 1:
            raise InvalidInputError("n must be a positive integer")
        n = int(n)
        return cls(theta_hat=float(theta_hat), sigma_tot=sigma / math.sqrt(n), sigma=float(sigma), n=n)

    def z(self, theta0: float) -> float:
        """Departure of ``theta_hat`` from ``theta0`` in units of ``sigma_tot``."""
        return (self.theta_hat - theta0) / self.sigma_tot


@dataclass(frozen=True)
class FrequentistResult:
    z: float
    p: float
    log10_p: float
    tails: Tails


def _upper_tail(z):
    return special.ndtr(-z)


def _log10_upper_tail(z):
    return special.log_ndtr(-z) / _LN10


def p_from_z(z: float, tails=Tails.ONE) -> FrequentistResult:
    """Tail probability for an observed standard-normal statistic ``z``.

    One-tailed: ``p = 1 - Phi(z)``.  Two-tailed: ``p = 2 (1 - Phi(|z|))``.
    """
    tails = Tails.coerce(tails)
    z = float(z)
    if not math.isfinite(z):
        raise InvalidInputError(f"z must be finite, got {z}")
    if tails is Tails.ONE:
        p = float(_upper_tail(z))
        log10_p = float(_log10_upper_tail(z))
    else:
        a = abs(z)
        p = float(2.0 * _upper_tail(a))
        log10_p = float(_log10_upper_tail(a) + math.log10(2.0))
    return FrequentistResult(z=z, p=p, log10_p=log10_p, tails=tails)


def z_from_p(p: float, tails=Tails.ONE) -> float:
    """Inverse of :func:`p_from_z` under the same tail convention.

    A one-tailed ``p`` above 1/2 maps to negative ``z``; ``p = 1`` gives
    ``-inf``.  A two-tailed ``p`` maps to ``z >= 0``.
    """
    tails = Tails.coerce(tails)
    p = float(p)
    if not (0.0 < p <= 1.0):
        raise InvalidInputError(f"p must lie in (0, 1], got {p}")
    if tails is Tails.TWO:
        p = p / 2.0
    return float(-special.ndtri(p))


def power_one_sided(alpha: float, delta_over_sigma: float) -> float:
    """Power ``1 - beta`` of the size-``alpha`` one-sided test against a shift ``delta``."""
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError("alpha must lie in (0, 1)")
    if not (delta_over_sigma >= 0.0 and math.isfinite(delta_over_sigma)):
        raise InvalidInputError("delta_over_sigma must be finite and >= 0")
    z_alpha = -special.ndtri(alpha)
    return float(special.ndtr(delta_over_sigma - z_alpha))


def balance_errors(delta_over_sigma: float, xtol: float = 1e-10):
    """Cut minimizing ``alpha + beta`` for N(0,1) vs N(delta,1).

    Returns ``(alpha, beta, cut)`` with ``cut`` in units of sigma.  The
    minimum is located by bracketing the zero of the derivative
    ``phi(c - delta) - phi(c)`` on ``[0, delta]``, compared in log space so
    that widely separated hypotheses do not underflow.
    """
    d = float(delta_over_sigma)
    if not math.isfinite(d) or d < 0:
        raise InvalidInputError("delta_over_sigma must be finite and >= 0")
    if d == 0.0:
        raise DegenerateInputError("alpha + beta = 1 for every cut when delta = 0")

    def slope_sign(c):
        return stats.norm.logpdf(c - d) - stats.norm.logpdf(c)

    cut = optimize.brentq(slope_sign, 0.0, d, xtol=xtol, rtol=4 * np.finfo(float).eps)
    mid = 0.5 * d
    # ties go to the midpoint
    if abs(cut - mid) <= xtol:
        cut = mid
    alpha = float(special.ndtr(-cut))
    beta = float(special.ndtr(cut - d))
    return alpha, beta, cut


def simple_vs_simple_pvalues(theta0: float, theta1: float, sigma_tot: float, theta_hat: float):
    """Both p-values of a test between two point hypotheses.

    ``p0`` is the tail of ``theta_hat`` under ``theta0`` in the direction
    of ``theta1``; ``p1`` is the tail under ``theta1`` towards ``theta0``.
    """
    if theta0 == theta1:
        raise DegenerateInputError("theta0 and theta1 coincide")
    if not sigma_tot > 0:
        raise InvalidInputError("sigma_tot must be > 0")
    sign = 1.0 if theta1 > theta0 else -1.0
    z0 = sign * (theta_hat - theta0) / sigma_tot
    z1 = sign * (theta1 - theta_hat) / sigma_tot
    return float(_upper_tail(z0)), float(_upper_tail(z1))


def ci_normal(measurement: Measurement, cl: float):
    """Central interval ``theta_hat -/+ q sigma_tot`` at confidence level ``cl``.

    ``q`` is the two-tailed critical value of size ``1 - cl`` computed by
    :func:`z_from_p`, so a value lies inside the interval exactly when its
    two-tailed p-value is at least ``1 - cl``.
    """
    if not (0.0 < cl < 1.0):
        raise InvalidInputError("cl must lie in (0, 1)")
    q = z_from_p(1.0 - cl, Tails.TWO)
    half = q * measurement.sigma_tot
    return measurement.theta_hat - half, measurement.theta_hat + half
