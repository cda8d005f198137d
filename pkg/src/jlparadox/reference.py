"""Bernardo's intrinsic-discrepancy compatibility check, asymptotic form only.

When the posterior is asymptotically normal the expected intrinsic
discrepancy of the null is ``d = (1 + z^2) / 2`` nats.  No finite-sample
version is offered; asking for one raises :class:`UnsupportedRegimeError`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidInputError, UnsupportedRegimeError

__all__ = [
    "Verdict",
    "DiscrepancyResult",
    "ref_discrepancy_asymptotic",
    "compatibility_verdict",
    "z_equivalent_cutoff",
]


class Verdict(enum.Enum):
    COMPATIBLE = "compatible"
    INCOMPATIBLE = "incompatible"


@dataclass(frozen=True)
class DiscrepancyResult:
    d: float
    z: float | None
    verdict: Verdict
    cutoff: float


def ref_discrepancy_asymptotic(z: float, small_sample: bool = False) -> float:
    if small_sample:
        raise UnsupportedRegimeError("only the large-sample form (1 + z^2)/2 is implemented")
    if not math.isfinite(z):
        raise InvalidInputError("z must be finite")
    return 0.5 * (1.0 + z * z)


def compatibility_verdict(d: float, cutoff: float, z: float | None = None) -> DiscrepancyResult:
    """``incompatible`` iff ``d > cutoff``.  There is no default cutoff."""
    if not d >= 0.0:
        raise InvalidInputError("d must be >= 0")
    if not cutoff > 0.0:
        raise InvalidInputError("cutoff must be > 0")
    verdict = Verdict.INCOMPATIBLE if d > cutoff else Verdict.COMPATIBLE
    return DiscrepancyResult(d=d, z=z, verdict=verdict, cutoff=cutoff)


def z_equivalent_cutoff(cutoff: float) -> float:
    """The |z| threshold that a fixed cutoff on ``d`` amounts to: ``sqrt(2 cutoff - 1)``.

    ``d > cutoff`` exactly when ``|z|`` exceeds the returned value.  Below
    1/2 every z is incompatible and ``-inf`` is returned.
    """
    if not cutoff > 0.0:
        raise InvalidInputError("cutoff must be > 0")
    if cutoff < 0.5:
        return -math.inf
    return math.sqrt(2.0 * cutoff - 1.0)
