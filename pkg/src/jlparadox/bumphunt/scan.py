"""Scan the mass grid and locate the smallest local p-value."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .local import _counting, profile_fit
from .model import BumpHuntModel, ObservedHistogram

__all__ = ["ScanResult", "scan", "scan_counts"]


@dataclass(frozen=True, eq=False)
class ScanResult:
    masses: np.ndarray
    local_p: np.ndarray
    local_z: np.ndarray
    theta_hat: np.ndarray
    p_min: float
    psi_hat: float
    theta_hat_at_psi_hat: float
    method: str

    def to_dict(self):
        return {
            "method": self.method,
            "p_min": self.p_min,
            "z_max": float(self.local_z.max()),
            "psi_hat": self.psi_hat,
            "theta_hat_at_psi_hat": self.theta_hat_at_psi_hat,
            "masses": self.masses.tolist(),
            "local_p": self.local_p.tolist(),
            "local_z": self.local_z.tolist(),
            "theta_hat": self.theta_hat.tolist(),
        }

    def rows(self):
        """``(psi, local_p, local_z, theta_hat)`` per mass, for CSV output."""
        return zip(self.masses.tolist(), self.local_p.tolist(), self.local_z.tolist(), self.theta_hat.tolist())


def scan_counts(model: BumpHuntModel, counts: np.ndarray):
    """Local ``(p, z, theta_hat)`` arrays over the grid for raw counts."""
    if model.local_method == "profile":
        lumi = model.luminosity_scale
        q0, theta = profile_fit(counts, model.background_expectation, lumi * model.templates)
        z = np.sqrt(q0)
        p = special.ndtr(-z)
        return p, z, theta
    n_mass = model.mass_grid.size
    p = np.empty(n_mass)
    theta = np.empty(n_mass)
    for j, psi in enumerate(model.mass_grid):
        n_obs, b, sig = _counting(model, counts, psi)
        p[j] = special.gammainc(n_obs, b) if n_obs > 0 and b > 0 else float(n_obs <= 0)
        frac = model.luminosity_scale * model.templates[j, sig].sum()
        theta[j] = max(n_obs - b, 0.0) / frac
    with np.errstate(divide="ignore"):
        z = -special.ndtri(p)
    return p, z, theta


def scan(model: BumpHuntModel, data: ObservedHistogram) -> ScanResult:
    """Local p-value at every grid mass with the model's local method.

    Ties for the minimum go to the smallest mass.
    """
    counts = data.check(model).counts
    p, z, theta = scan_counts(model, counts)
    j = int(np.argmin(p))
    return ScanResult(
        masses=model.mass_grid.copy(),
        local_p=p,
        local_z=z,
        theta_hat=theta,
        p_min=float(p[j]),
        psi_hat=float(model.mass_grid[j]),
        theta_hat_at_psi_hat=float(theta[j]),
        method=model.local_method,
    )
