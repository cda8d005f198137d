"""Local p-values at one mass: sideband counting and profile likelihood ratio."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import special

from ..errors import GeometryError, NumericalError
from .model import BumpHuntModel, ObservedHistogram

__all__ = [
    "ProfileResult",
    "poisson_tail",
    "signal_and_sidebands",
    "local_p_counting",
    "profile_fit",
    "local_p_profile",
]


def poisson_tail(n_obs, b):
    """``P(N >= n_obs)`` for ``N ~ Poisson(b)``."""
    n_obs = int(n_obs)
    if n_obs <= 0:
        return 1.0
    if b <= 0:
        return 0.0
    return float(special.gammainc(n_obs, b))


def signal_and_sidebands(model: BumpHuntModel, psi: float):
    """Index slices ``(signal, left, right)`` for the counting test at ``psi``.

    The signal window is every bin whose centre lies within
    ``psi -/+ window * resolution``; the two flanking sidebands are adjacent
    to it and together span ``sideband_ratio`` times its width in bins
    (rounded up, split evenly).
    """
    centers = model.bin_centers
    half = model.window * model.signal_resolution
    inside = np.flatnonzero(np.abs(centers - psi) <= half)
    if inside.size == 0:
        raise GeometryError(f"signal window at psi={psi} contains no bin centre")
    lo, hi = int(inside[0]), int(inside[-1]) + 1
    per_side = max(1, math.ceil(model.sideband_ratio * (hi - lo) / 2))
    if lo - per_side < 0 or hi + per_side > model.n_bins:
        raise GeometryError(f"sidebands for psi={psi} fall off the histogram "
                            f"({per_side} bins per side needed)")
    return slice(lo, hi), slice(lo - per_side, lo), slice(hi, hi + per_side)


def _counting(model, counts, psi):
    sig, left, right = signal_and_sidebands(model, psi)
    expected = model.background_expectation
    e_sig = expected[sig].sum()
    e_side = expected[left].sum() + expected[right].sum()
    if not e_side > 0:
        raise GeometryError(f"sidebands at psi={psi} have zero expected background")
    side = counts[left].sum() + counts[right].sum()
    b = side * e_sig / e_side
    n_obs = int(counts[sig].sum())
    return n_obs, b, sig


def local_p_counting(model: BumpHuntModel, data: ObservedHistogram, psi: float) -> float:
    """Poisson probability of at least the observed count in the signal window.

    The null expectation is the sideband count scaled by the ratio of
    expected background in the window to that in the sidebands.  It is
    used as if known, so the sidebands' own Poisson noise is ignored and
    the p-value runs small unless the sidebands hold many more events
    than the window.
    """
    counts = data.check(model).counts
    n_obs, b, _ = _counting(model, counts, psi)
    return poisson_tail(n_obs, b)


class ProfileResult(NamedTuple):
    q0: float
    z: float
    p: float
    theta_hat: float


def profile_fit(counts, background, templates, max_iter=200, tol=1e-12):
    """Binned Poisson fit of ``nu * background + theta * template`` with ``theta >= 0``.

    ``templates`` is ``(n_masses, n_bins)`` and already includes any
    luminosity factor, as does ``background``.  Returns arrays
    ``(q0, theta_hat)`` of length ``n_masses``.

    At the joint maximum ``nu B + theta S = N`` (totals of background,
    template and counts), so the fit reduces to a concave one-dimensional
    problem along that line, solved by safeguarded Newton.  The null fit is
    ``nu = N / B``.
    """
    n = np.asarray(counts, dtype=float)
    bkg = np.asarray(background, dtype=float)
    tmpl = np.atleast_2d(np.asarray(templates, dtype=float))
    n_mass = tmpl.shape[0]
    total = n.sum()
    if total == 0:
        return np.zeros(n_mass), np.zeros(n_mass)

    b_total = bkg.sum()
    s_total = tmpl.sum(axis=1)
    keep = n > 0
    n, bkg_k, tmpl = n[keep], bkg[keep], tmpl[:, keep]
    mu0 = (total / b_total) * bkg_k
    w = tmpl - (s_total / b_total)[:, None] * bkg_k[None, :]

    with np.errstate(divide="ignore", invalid="ignore"):
        def grad(theta):
            mu = mu0[None, :] + theta[:, None] * w
            r = n / mu
            return (r * w).sum(axis=1), -(r * r / n * w * w).sum(axis=1)

        g0, _ = grad(np.zeros(n_mass))
        theta = np.zeros(n_mass)
        # a slope at theta = 0 within rounding of zero is treated as zero
        noise = 64 * np.finfo(float).eps * (np.abs(w) * (n / mu0)).sum(axis=1)
        active = g0 > noise
        lo = np.zeros(n_mass)
        hi = np.where(s_total > 0, total / np.where(s_total > 0, s_total, 1.0), 0.0)
        converged = ~active
        for _ in range(max_iter):
            if converged.all():
                break
            g, h = grad(theta)
            lo = np.where(active & (g > 0), theta, lo)
            hi = np.where(active & (g <= 0), theta, hi)
            step = -g / h
            cand = theta + step
            bad = ~np.isfinite(cand) | (cand <= lo) | (cand >= hi)
            cand = np.where(bad, 0.5 * (lo + hi), cand)
            done = (np.abs(cand - theta) <= tol * np.maximum(np.abs(theta), 1e-300)) | (hi - lo <= tol * hi)
            theta = np.where(converged, theta, cand)
            converged |= done
        if not converged.all():
            bad_idx = np.flatnonzero(~converged)
            raise NumericalError("profile fit did not converge",
                                 {"masses": bad_idx.tolist(), "theta": theta[bad_idx].tolist(),
                                  "bracket": list(zip(lo[bad_idx].tolist(), hi[bad_idx].tolist()))})

        mu_hat = mu0[None, :] + theta[:, None] * w
        q0 = 2.0 * (n * np.log(mu_hat / mu0)).sum(axis=1)
    q0 = np.where(active, np.maximum(q0, 0.0), 0.0)
    theta = np.where(active, theta, 0.0)
    return q0, theta


def local_p_profile(model: BumpHuntModel, data: ObservedHistogram, psi: float) -> ProfileResult:
    """Profile-likelihood-ratio significance of a bump at ``psi``.

    The background normalization floats in both fits.  ``q0`` is clamped
    to 0 when the best-fit strength is 0, ``z = sqrt(q0)`` and ``p`` is the
    one-tailed normal tail of ``z``.  ``theta_hat`` is per unit luminosity.
    """
    counts = data.check(model).counts
    lumi = model.luminosity_scale
    q0, theta = profile_fit(counts, model.background_expectation, lumi * model.template(psi)[None, :])
    q0 = float(q0[0])
    z = math.sqrt(q0)
    return ProfileResult(q0=q0, z=z, p=float(special.ndtr(-z)), theta_hat=float(theta[0]))
