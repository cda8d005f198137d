"""Point-null model selection with mixture priors.

A mixture prior puts mass ``pi0`` on the null ``theta = theta0`` (or on a
small uniform window of half-width ``epsilon0`` around it) and spreads the
rest with an alternative density ``g`` of scale ``tau``.  The Bayes factor
``B01`` compares the likelihood averaged over the null to the likelihood
averaged over ``g``.

The alternative marginal is computed by adaptive quadrature (scipy's
QUADPACK ``quad``) on a handful of finite pieces chosen to cover the
integrand's bulk, each rescaled by its own maximum so that nothing
underflows even at z = 40.  For a normal ``g`` and a point null the
convolution of two normals gives a closed form, used as the fast path.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy import integrate, optimize, special

from .errors import InvalidInputError, NumericalError
from .likelihood import max_lik_ratio
from .normal import FrequentistResult, Measurement, Tails, p_from_z

__all__ = [
    "PriorFamily",
    "AlternativePrior",
    "MixturePrior",
    "Method",
    "BayesResult",
    "ParadoxReport",
    "AsymptoticRegimeWarning",
    "log_marginal_likelihood_h1",
    "marginal_likelihood_h1",
    "log_null_likelihood",
    "bayes_factor_exact",
    "bayes_factor_asymptotic",
    "posterior_h0",
    "hierarchy_ok",
    "jl_crossover",
    "paradox_report",
]

_LN10 = math.log(10.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# half-width of every integration window, in units of the relevant scale
_WINDOW = 16.0
_EPSREL = 1e-10
_LIMIT = 500


class AsymptoticRegimeWarning(UserWarning):
    """tau/sigma_tot is too small for the asymptotic Bayes factor to be trusted."""


class PriorFamily(enum.Enum):
    NORMAL = "normal"
    UNIFORM = "uniform"
    CAUCHY = "cauchy"


class Method(enum.Enum):
    EXACT_QUADRATURE = "exact_quadrature"
    EXACT_CLOSED_FORM = "exact_closed_form"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class AlternativePrior:
    """Proper density ``g`` for theta under H1.

    ``tau`` is the standard deviation (normal), the full width (uniform) or
    the half-width at half-maximum (Cauchy).  ``center=None`` means "use the
    null value" and is resolved by :class:`MixturePrior`.
    """

    family: PriorFamily
    tau: float
    center: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", PriorFamily(self.family))
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise InvalidInputError("tau must be finite and > 0")

    def located(self, center: float) -> "AlternativePrior":
        return self if self.center is not None else replace(self, center=float(center))

    def _c(self) -> float:
        if self.center is None:
            raise InvalidInputError("prior center unresolved; pass it or use a MixturePrior")
        return self.center

    def logpdf(self, theta):
        c, tau = self._c(), self.tau
        theta = np.asarray(theta, dtype=float)
        if self.family is PriorFamily.NORMAL:
            u = (theta - c) / tau
            return -0.5 * u * u - _LOG_SQRT_2PI - math.log(tau)
        if self.family is PriorFamily.UNIFORM:
            inside = np.abs(theta - c) <= 0.5 * tau
            return np.where(inside, -math.log(tau), -np.inf)
        u = (theta - c) / tau
        return -np.log1p(u * u) - math.log(math.pi * tau)

    def pdf(self, theta):
        return np.exp(self.logpdf(theta))


@dataclass(frozen=True)
class MixturePrior:
    """``pi0`` on the (possibly smeared) null, ``1 - pi0`` spread by ``alt``."""

    pi0: float
    theta0: float
    alt: AlternativePrior
    epsilon0: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.pi0 < 1.0):
            raise InvalidInputError("pi0 must lie in (0, 1)")
        if not (self.epsilon0 >= 0.0 and math.isfinite(self.epsilon0)):
            raise InvalidInputError("epsilon0 must be finite and >= 0")
        object.__setattr__(self, "alt", self.alt.located(self.theta0))

    @property
    def pi1(self) -> float:
        return 1.0 - self.pi0

    @classmethod
    def simple(cls, family="normal", tau=1.0, pi0=0.5, theta0=0.0, epsilon0=0.0):
        return cls(pi0=pi0, theta0=theta0, alt=AlternativePrior(PriorFamily(family), tau), epsilon0=epsilon0)


@dataclass(frozen=True)
class BayesResult:
    bf: float
    log10_bf: float
    ockham: float
    posterior_h0: float
    method: Method

    def to_dict(self):
        d = asdict(self)
        d["method"] = self.method.value
        return d


# ---------------------------------------------------------------------------
# quadrature


def _log_quad(logf, a, b, points=()):
    """``ln int_a^b exp(logf)`` with the integrand rescaled by its maximum."""
    if not b > a:
        return -np.inf
    inner = sorted({float(p) for p in points if a < p < b})
    grid = np.concatenate([np.linspace(a, b, 257), inner])
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = logf(grid)
    shift = float(np.max(vals))
    if not np.isfinite(shift):
        return -np.inf

    def f(t):
        return math.exp(float(logf(t)) - shift)

    val, abserr, info = integrate.quad(
        f, a, b, points=inner or None, epsabs=0.0, epsrel=_EPSREL, limit=_LIMIT, full_output=1
    )[:3]
    if not (val > 0 and abserr <= 1e-8 * val):
        raise NumericalError(
            "quadrature did not converge",
            {"interval": (a, b), "value": val, "abserr": abserr, "neval": info.get("neval"),
             "last": info.get("last")},
        )
    return math.log(val) + shift


def log_marginal_likelihood_h1(measurement: Measurement, prior: AlternativePrior) -> float:
    """``ln int g(theta) L(theta) dtheta`` by adaptive quadrature."""
    th, s = measurement.theta_hat, measurement.sigma_tot
    c, tau = prior._c(), prior.tau
    neg_log_norm = -_LOG_SQRT_2PI - math.log(s)

    def log_l(t):
        u = (np.asarray(t, dtype=float) - th) / s
        return -0.5 * u * u + neg_log_norm

    def logf(t):
        return log_l(t) + prior.logpdf(t)

    if prior.family is PriorFamily.NORMAL:
        # integrate over theta = m + w u so that a prior narrower than the
        # float spacing near theta is still sampled smoothly
        v = s * s + tau * tau
        m = (th * tau * tau + c * s * s) / v
        w = s * tau / math.sqrt(v)
        dl, dg = (m - th) / s, (m - c) / tau
        log_const = neg_log_norm - _LOG_SQRT_2PI - math.log(tau) + math.log(w)

        def logf_std(u):
            a = dl + (w / s) * u
            b = dg + (w / tau) * u
            return log_const - 0.5 * (a * a + b * b)

        return _log_quad(logf_std, -_WINDOW, _WINDOW, points=(0.0,))

    if prior.family is PriorFamily.UNIFORM:
        # theta = c + tau u with u on [-1/2, 1/2]; g dtheta is then du
        dl, k = (c - th) / s, tau / s
        mode = min(max(-dl / k, -0.5), 0.5)
        a, b = max(-0.5, mode - _WINDOW / k), min(0.5, mode + _WINDOW / k)

        def logf_std(u):
            x = dl + k * u
            return neg_log_norm - 0.5 * x * x

        return _log_quad(logf_std, a, b, points=(mode,))

    # Cauchy.  The likelihood bulk theta_hat -/+ 16 sigma is integrated in
    # theta with breakpoints spaced geometrically around the prior peak, so a
    # narrow spike and its 1/theta^2 shoulders are both resolved.  Outside
    # it, theta = c + tau tan(u) turns g dtheta into du / pi; those pieces
    # are only integrated when a crude upper bound says they could matter.
    a, b = th - _WINDOW * s, th + _WINDOW * s
    offsets = tau * 4.0 ** np.arange(0, 40)
    pts = np.concatenate([[th, c], c - offsets, c + offsets])
    middle = _log_quad(logf, a, b, points=pts)

    def logf_u(u):
        return log_l(c + tau * np.tan(u)) - math.log(math.pi)

    half_pi = 0.5 * math.pi
    ua, ub = math.atan((a - c) / tau), math.atan((b - c) / tau)
    pieces = [middle]
    for lo, hi, edge in ((-half_pi, ua, a), (ub, half_pi, b)):
        if not hi > lo:
            continue
        bound = float(log_l(edge))
        if bound > middle - 35.0:
            pieces.append(_log_quad(logf_u, lo, hi, points=(0.0,)))
    return float(special.logsumexp(pieces))


def marginal_likelihood_h1(measurement: Measurement, prior: AlternativePrior) -> float:
    return math.exp(log_marginal_likelihood_h1(measurement, prior))


def _log_marginal_normal_closed_form(measurement: Measurement, prior: AlternativePrior) -> float:
    v = measurement.sigma_tot ** 2 + prior.tau ** 2
    d = measurement.theta_hat - prior._c()
    return -0.5 * d * d / v - _LOG_SQRT_2PI - 0.5 * math.log(v)


def log_null_likelihood(measurement: Measurement, theta0: float, epsilon0: float = 0.0) -> float:
    """``ln L(theta0)``, or the log of L averaged uniformly over ``theta0 -/+ epsilon0``."""
    th, s = measurement.theta_hat, measurement.sigma_tot

    def log_l(t):
        u = (np.asarray(t, dtype=float) - th) / s
        return -0.5 * u * u - _LOG_SQRT_2PI - math.log(s)

    if epsilon0 == 0.0:
        return float(log_l(theta0))
    return _log_quad(log_l, theta0 - epsilon0, theta0 + epsilon0, points=(th,)) - math.log(2.0 * epsilon0)


# ---------------------------------------------------------------------------
# Bayes factors


def posterior_h0(bf: float, pi0: float) -> float:
    """``P(H0 | data) = pi0 BF / (pi0 BF + 1 - pi0)``."""
    if not (0.0 < pi0 < 1.0):
        raise InvalidInputError("pi0 must lie in (0, 1)")
    if not bf >= 0.0:
        raise InvalidInputError("bf must be >= 0")
    if math.isinf(bf):
        return 1.0
    return pi0 * bf / (pi0 * bf + (1.0 - pi0))


def _posterior_from_log10_bf(log10_bf: float, pi0: float) -> float:
    bf = 10.0 ** log10_bf if log10_bf < 300 else math.inf
    if 0.0 < bf < math.inf:
        return posterior_h0(bf, pi0)
    # beyond float range: work with log odds
    return float(special.expit(log10_bf * _LN10 + math.log(pi0 / (1.0 - pi0))))


def _result(log10_bf, ockham, pi0, method):
    bf = 10.0 ** log10_bf if log10_bf < 308 else math.inf
    return BayesResult(bf=bf, log10_bf=log10_bf, ockham=ockham,
                       posterior_h0=_posterior_from_log10_bf(log10_bf, pi0), method=method)


def bayes_factor_exact(measurement: Measurement, prior: MixturePrior, method: str = "auto") -> BayesResult:
    """Exact ``B01`` for the mixture prior.

    ``method`` is ``"quadrature"``, ``"closed_form"`` (normal alternative,
    point null only) or ``"auto"``, which takes the closed form whenever
    it applies.
    """
    alt = prior.alt
    closed_ok = alt.family is PriorFamily.NORMAL and prior.epsilon0 == 0.0
    if method == "auto":
        method = "closed_form" if closed_ok else "quadrature"
    if method == "closed_form":
        if not closed_ok:
            raise InvalidInputError("closed form needs a normal alternative and a point null")
        log_m1 = _log_marginal_normal_closed_form(measurement, alt)
        tag = Method.EXACT_CLOSED_FORM
    elif method == "quadrature":
        log_m1 = log_marginal_likelihood_h1(measurement, alt)
        tag = Method.EXACT_QUADRATURE
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    log_m0 = log_null_likelihood(measurement, prior.theta0, prior.epsilon0)
    log10_bf = (log_m0 - log_m1) / _LN10
    return _result(log10_bf, measurement.sigma_tot / alt.tau, prior.pi0, tag)


def bayes_factor_asymptotic(z: float, tau_over_sigma: float, pi0: float = 0.5) -> BayesResult:
    """``B01 = (tau / sigma_tot) exp(-z^2 / 2)``, the wide-normal-prior limit."""
    r = float(tau_over_sigma)
    if not (math.isfinite(r) and r > 0):
        raise InvalidInputError("tau_over_sigma must be finite and > 0")
    if r < 10:
        warnings.warn(f"tau/sigma_tot = {r:g} < 10: asymptotic Bayes factor is unreliable",
                      AsymptoticRegimeWarning, stacklevel=2)
    bf = r * max_lik_ratio(z)
    log10_bf = math.log10(r) - 0.5 * z * z / _LN10
    post = posterior_h0(bf, pi0) if bf > 0 else _posterior_from_log10_bf(log10_bf, pi0)
    return BayesResult(bf=bf, log10_bf=log10_bf, ockham=1.0 / r, posterior_h0=post,
                       method=Method.ASYMPTOTIC)


def hierarchy_ok(epsilon0: float, sigma_tot: float, tau: float, ratio: float = 100.0) -> bool:
    """``epsilon0 << sigma_tot << tau`` with "<<" meaning a factor ``ratio``."""
    return epsilon0 * ratio <= sigma_tot and sigma_tot * ratio <= tau


def _log_bf_standard(z, r, family, method):
    m = Measurement(theta_hat=float(z), sigma_tot=1.0)
    prior = MixturePrior(pi0=0.5, theta0=0.0, alt=AlternativePrior(PriorFamily(family), r))
    return bayes_factor_exact(m, prior, method=method).log10_bf


def jl_crossover(z: float, prior_family="normal", method: str = "quadrature", rtol: float = 1e-6):
    """Smallest ``r = tau / sigma_tot`` at which the exact Bayes factor reaches 1.

    Below it the data favour H1, above it they favour H0.  Returns ``None``
    when ``B01 >= 1`` for every ``r`` (``|z| <= 1`` for the normal prior)
    and ``inf`` when the crossing lies beyond float range.
    """
    if not math.isfinite(z):
        raise InvalidInputError("z must be finite")
    z = abs(float(z))
    family = PriorFamily(prior_family)

    def f(log_r):
        return _log_bf_standard(z, math.exp(log_r), family, method)

    # asymptotically r* ~ exp(z^2/2) up to an O(1) family constant
    upper = 0.5 * z * z + math.log(1e3)
    if upper > 700:
        return math.inf
    grid = np.arange(math.log(1e-3), upper + 0.5, 0.5)
    prev_x, prev_v, seen_negative = None, None, False
    for x in grid:
        v = f(x)
        if v < 0:
            seen_negative = True
        elif seen_negative and prev_v is not None and prev_v < 0:
            root = optimize.brentq(f, prev_x, x, xtol=rtol * 1e-3, rtol=1e-12, maxiter=200)
            return math.exp(root)
        prev_x, prev_v = x, v
    return None if not seen_negative else math.inf


# ---------------------------------------------------------------------------
# combined report


@dataclass(frozen=True)
class ParadoxReport:
    frequentist: FrequentistResult
    lam: float
    neg2_log_lam: float
    exact: BayesResult
    asymptotic: BayesResult
    ockham: float
    tau_over_sigma: float
    hierarchy_ok: bool
    alpha: float
    disagreement: bool

    def to_dict(self):
        f = self.frequentist
        return {
            "z": f.z, "p": f.p, "log10_p": f.log10_p, "tails": f.tails.value,
            "lambda": self.lam, "neg2_log_lambda": self.neg2_log_lam,
            "exact": self.exact.to_dict(), "asymptotic": self.asymptotic.to_dict(),
            "ockham": self.ockham, "tau_over_sigma": self.tau_over_sigma,
            "hierarchy_ok": self.hierarchy_ok, "alpha": self.alpha,
            "disagreement": self.disagreement,
        }


def paradox_report(measurement: Measurement, prior: MixturePrior, alpha: float | None = None,
                   tails=Tails.ONE, hierarchy_ratio: float = 100.0, method: str = "auto") -> ParadoxReport:
    """Frequentist and Bayesian verdicts side by side.

    ``disagreement`` is set when the test rejects at level ``alpha``
    (``p <= alpha``; default the one-tailed 5 sigma tail) while the
    posterior still prefers H0.
    """
    if alpha is None:
        alpha = p_from_z(5.0, Tails.ONE).p
    z = measurement.z(prior.theta0)
    freq = p_from_z(z, tails)
    r = prior.alt.tau / measurement.sigma_tot
    exact = bayes_factor_exact(measurement, prior, method=method)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticRegimeWarning)
        asym = bayes_factor_asymptotic(z, r, prior.pi0)
    lam = max_lik_ratio(z)
    return ParadoxReport(
        frequentist=freq,
        lam=lam,
        neg2_log_lam=z * z,
        exact=exact,
        asymptotic=asym,
        ockham=1.0 / r,
        tau_over_sigma=r,
        hierarchy_ok=hierarchy_ok(prior.epsilon0, measurement.sigma_tot, prior.alt.tau, hierarchy_ratio),
        alpha=alpha,
        disagreement=bool(freq.p <= alpha and exact.posterior_h0 > 0.5),
    )
