"""Global p-values and trials factors for a mass scan (look-elsewhere effect)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special

from ..errors import CalibrationError, ConsistencyError, InvalidInputError
from .model import BumpHuntModel
from .scan import ScanResult
from .toys import STREAM_CALIBRATION, STREAM_NULL, ToyEnsemble, run_toys

__all__ = ["GlobalResult", "global_p_mc", "global_p_upcrossing", "count_upcrossings", "trials_factor"]

# one-sided 68% upper limit on a binomial rate with zero successes
_ZERO_SUCCESS_CL = 0.68


@dataclass(frozen=True)
class GlobalResult:
    global_p: float
    mc_uncertainty: float
    n_toys: int
    trials_factor: float
    method: str
    local_p: float
    upper_limit: bool = False
    n_success: int | None = None
    reference_z: float | None = None
    target_z: float | None = None
    mean_upcrossings: float | None = None

    def to_dict(self):
        return asdict(self)


def trials_factor(global_p: float, local_p: float, mc_uncertainty: float = 0.0) -> float:
    """``global_p / local_p``; inconsistent orderings beyond 3 MC sigma raise."""
    if not (0.0 < local_p <= 1.0) or not (0.0 <= global_p <= 1.0):
        raise InvalidInputError("p-values must lie in (0, 1]")
    if global_p + 3.0 * mc_uncertainty < local_p:
        raise ConsistencyError(
            f"global p {global_p:g} is below local p {local_p:g} beyond MC tolerance ({mc_uncertainty:g})"
        )
    return global_p / local_p


def global_p_mc(model: BumpHuntModel, p_min_observed: float, n_toys: int, seed: int,
                workers: int = 1, toys: ToyEnsemble | None = None) -> GlobalResult:
    """Fraction of H0 toys whose smallest local p-value is at most ``p_min_observed``.

    With no successes the one-sided 68% binomial upper limit is reported
    instead of 0 and ``upper_limit`` is set.  A precomputed ``toys``
    ensemble may be passed to share scans between estimators.
    """
    if toys is None:
        if n_toys < 100:
            raise InvalidInputError("n_toys must be >= 100")
        toys = run_toys(model, n_toys, seed, STREAM_NULL, workers)
    n = toys.n_toys
    k = int(np.count_nonzero(toys.p_min <= p_min_observed))
    if k == 0:
        p = 1.0 - (1.0 - _ZERO_SUCCESS_CL) ** (1.0 / n)
        err = p
        upper = True
    else:
        p = k / n
        err = math.sqrt(p * (1.0 - p) / n)
        upper = False
    tf = trials_factor(p, p_min_observed, err) if p_min_observed > 0 else math.inf
    return GlobalResult(global_p=p, mc_uncertainty=err, n_toys=n, trials_factor=tf,
                        method="monte_carlo", local_p=float(p_min_observed), upper_limit=upper,
                        n_success=k)


def count_upcrossings(local_z: np.ndarray, level: float) -> np.ndarray:
    """Upward crossings of ``level`` along the mass axis (last axis).

    A crossing is a step from below ``level`` to at-or-above it; a curve
    that starts above ``level`` does not count, as the local tail term
    already covers that case.
    """
    z = np.atleast_2d(local_z)
    return np.count_nonzero((z[:, :-1] < level) & (z[:, 1:] >= level), axis=1)


def global_p_upcrossing(model: BumpHuntModel, observed: ScanResult | None = None,
                        target_z: float | None = None, reference_z: float = 1.0,
                        n_calibration_toys: int = 1000, seed: int = 0, workers: int = 1,
                        toys: ToyEnsemble | None = None) -> GlobalResult:
    """Extrapolate the global p-value from upcrossings at a low reference level.

    ``global_p = p_local(target) + <N(reference)> exp(-(target^2 - reference^2) / 2)``
    where ``<N>`` is the mean number of upcrossings of the local
    significance curve at ``reference_z`` over background-only calibration
    toys and ``p_local`` is the one-tailed normal tail.  The target
    defaults to the largest local z of ``observed``.
    """
    if reference_z > 2.0:
        raise InvalidInputError("reference_z must be <= 2 so that upcrossings are plentiful")
    if target_z is None:
        if observed is None:
            raise InvalidInputError("give target_z or an observed scan")
        target_z = float(np.max(observed.local_z))
    if toys is None:
        toys = run_toys(model, n_calibration_toys, seed, STREAM_CALIBRATION, workers)
    counts = count_upcrossings(toys.local_z, reference_z)
    mean_n = float(counts.mean())
    n = toys.n_toys
    sd_n = float(counts.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    if mean_n == 0.0 and model.mass_grid.size > 1:
        raise CalibrationError(
            f"no upcrossings of z={reference_z} in {n} calibration toys; lower reference_z"
        )
    local_p = float(special.ndtr(-target_z))
    factor = math.exp(-0.5 * (target_z * target_z - reference_z * reference_z))
    p = min(1.0, local_p + mean_n * factor)
    err = sd_n * factor
    return GlobalResult(global_p=p, mc_uncertainty=err, n_toys=n, trials_factor=p / local_p,
                        method="upcrossing", local_p=local_p, reference_z=float(reference_z),
                        target_z=float(target_z), mean_upcrossings=mean_n)
