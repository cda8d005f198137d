"""Normal likelihood of a point estimate and the maximum-likelihood ratio."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .normal import Measurement

__all__ = [
    "LikelihoodCurve",
    "log_likelihood",
    "max_lik_ratio",
    "log_max_lik_ratio",
    "neg2_log_lik_ratio",
    "mle_from_samples",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class LikelihoodCurve:
    theta_hat: float
    sigma_tot: float

    def __post_init__(self):
        if not self.sigma_tot > 0:
            raise InvalidInputError("sigma_tot must be > 0")

    @classmethod
    def from_measurement(cls, m: Measurement) -> "LikelihoodCurve":
        return cls(m.theta_hat, m.sigma_tot)

    def log_pdf(self, theta):
        """Vectorised ``ln L(theta)``, normalisation included."""
        u = (np.asarray(theta, dtype=float) - self.theta_hat) / self.sigma_tot
        return -0.5 * u * u - _LOG_SQRT_2PI - math.log(self.sigma_tot)


def log_likelihood(curve: LikelihoodCurve, theta: float) -> float:
    return float(curve.log_pdf(theta))


def log_max_lik_ratio(z: float) -> float:
    """``ln lambda = -z^2 / 2``; stays finite where ``lambda`` underflows."""
    if not math.isfinite(z):
        raise InvalidInputError("z must be finite")
    return -0.5 * z * z


def max_lik_ratio(z: float) -> float:
    """``lambda = L(theta0) / L(theta_hat) = exp(-z^2/2)``."""
    return math.exp(log_max_lik_ratio(z))


def neg2_log_lik_ratio(z: float) -> float:
    """The same ratio as the test statistic ``-2 ln lambda = z^2``."""
    return -2.0 * log_max_lik_ratio(z)


def mle_from_samples(samples, sigma: float) -> Measurement:
    """Sample mean as MLE, with ``sigma_tot = sigma / sqrt(n)``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise InvalidInputError("need at least one sample")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("samples must be finite")
    return Measurement.from_sample_size(float(x.mean()), sigma, int(x.size))
