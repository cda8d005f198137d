"""Binned background + Gaussian bump model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special

from ..errors import ConfigError, GeometryError, InvalidInputError

__all__ = ["BumpHuntModel", "ObservedHistogram", "build_model", "background_from_shape"]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BumpHuntModel:
    """Expected counts per bin under H0 and the bump template on a mass grid.

    ``background_shape`` is the per-bin expectation at unit luminosity; the
    model's expectations are ``luminosity_scale * (nu * background_shape +
    theta * template(psi))`` with ``nu = 1`` under the nominal background.
    The signal window used by the counting test spans
    ``psi -/+ window * signal_resolution``; the flanking sidebands together
    cover ``sideband_ratio`` times the window width.
    """

    bin_edges: np.ndarray
    background_shape: np.ndarray
    signal_resolution: float
    mass_grid: np.ndarray
    luminosity_scale: float = 1.0
    window: float = 2.0
    sideband_ratio: float = 1.0
    local_method: str = "profile"

    def __post_init__(self):
        edges = _frozen(self.bin_edges)
        bkg = _frozen(self.background_shape)
        grid = _frozen(np.atleast_1d(self.mass_grid))
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "background_shape", bkg)
        object.__setattr__(self, "mass_grid", grid)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise InvalidInputError("bin_edges must be strictly increasing with at least two entries")
        if bkg.shape != (edges.size - 1,):
            raise InvalidInputError("background_shape needs one entry per bin")
        if not np.all(np.isfinite(bkg)) or np.any(bkg < 0):
            raise InvalidInputError("background expectations must be finite and >= 0")
        if not bkg.sum() > 0:
            raise InvalidInputError("degenerate background: total expectation is zero")
        if not (self.signal_resolution > 0 and math.isfinite(self.signal_resolution)):
            raise InvalidInputError("signal_resolution must be > 0")
        if not self.luminosity_scale > 0:
            raise InvalidInputError("luminosity_scale must be > 0")
        if self.local_method not in ("profile", "counting"):
            raise InvalidInputError("local_method must be 'profile' or 'counting'")
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise InvalidInputError("mass_grid must be non-empty and strictly increasing")
        margin = self.window * self.signal_resolution
        if grid[0] < edges[0] + margin or grid[-1] > edges[-1] - margin:
            raise GeometryError(
                f"mass_grid must lie within [{edges[0] + margin}, {edges[-1] - margin}] "
                "so that every signal template fits"
            )

    @property
    def n_bins(self) -> int:
        return self.background_shape.size

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @cached_property
    def background_expectation(self) -> np.ndarray:
        return _frozen(self.luminosity_scale * self.background_shape)

    def template(self, psi: float) -> np.ndarray:
        """Fraction of a unit-strength N(psi, resolution^2) bump in each bin."""
        cdf = special.ndtr((self.bin_edges - psi) / self.signal_resolution)
        return np.diff(cdf)

    @cached_property
    def templates(self) -> np.ndarray:
        """``(n_masses, n_bins)`` templates on the mass grid."""
        cdf = special.ndtr((self.bin_edges[None, :] - self.mass_grid[:, None]) / self.signal_resolution)
        return _frozen(np.diff(cdf, axis=1))

    def expected(self, theta: float = 0.0, psi: float | None = None) -> np.ndarray:
        mu = self.background_shape.copy()
        if theta:
            if psi is None:
                raise InvalidInputError("theta > 0 needs a mass psi")
            mu = mu + theta * self.template(psi)
        return self.luminosity_scale * mu

    def with_grid(self, mass_grid) -> "BumpHuntModel":
        return BumpHuntModel(self.bin_edges, self.background_shape, self.signal_resolution, mass_grid,
                             self.luminosity_scale, self.window, self.sideband_ratio, self.local_method)


@dataclass(frozen=True, eq=False)
class ObservedHistogram:
    counts: np.ndarray = field()

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 1:
            raise InvalidInputError("counts must be one-dimensional")
        if np.any(c < 0) or not np.all(np.equal(np.mod(c, 1), 0)):
            raise InvalidInputError("counts must be non-negative integers")
        object.__setattr__(self, "counts", _frozen(c, dtype=np.int64))

    def check(self, model: BumpHuntModel) -> "ObservedHistogram":
        if self.counts.size != model.n_bins:
            raise InvalidInputError(f"histogram has {self.counts.size} bins, model has {model.n_bins}")
        return self


def background_from_shape(edges, section, path="background"):
    """Per-bin expectations for a named background shape.

    ``flat`` takes ``per_bin``; ``exponential`` takes ``total`` and
    ``decay`` and integrates ``exp(-(m - low) / decay)`` over each bin;
    ``table`` takes explicit ``values``.
    """
    edges = np.asarray(edges, dtype=float)
    n = edges.size - 1
    shape = _get(section, "shape", path, str)
    if shape == "flat":
        per_bin = _get(section, "per_bin", path, float)
        if per_bin < 0:
            raise ConfigError(f"{path}.per_bin", "must be >= 0")
        values = np.full(n, per_bin)
    elif shape == "exponential":
        total = _get(section, "total", path, float)
        decay = _get(section, "decay", path, float)
        if not decay > 0:
            raise ConfigError(f"{path}.decay", "must be > 0")
        if total < 0:
            raise ConfigError(f"{path}.total", "must be >= 0")
        x = (edges - edges[0]) / decay
        cdf = -np.expm1(-x)
        values = total * np.diff(cdf) / cdf[-1]
    elif shape == "table":
        values = np.asarray(_get(section, "values", path, list), dtype=float)
        if values.shape != (n,):
            raise ConfigError(f"{path}.values", f"expected {n} entries, got {values.size}")
    else:
        raise ConfigError(f"{path}.shape", f"unknown shape {shape!r} (flat | exponential | table)")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise ConfigError(path, "expectations must be finite and >= 0")
    if not values.sum() > 0:
        raise ConfigError(path, "degenerate background: total expectation is zero")
    return values


def _get(mapping, key, path, kind):
    if not isinstance(mapping, dict):
        raise ConfigError(path, "expected a table")
    if key not in mapping:
        raise ConfigError(f"{path}.{key}", "missing")
    value = mapping[key]
    try:
        if kind is float:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise TypeError
            return int(value)
        if kind is list:
            if not isinstance(value, (list, tuple)):
                raise TypeError
            return list(value)
        if not isinstance(value, kind):
            raise TypeError
        return value
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}", f"expected {kind.__name__}, got {value!r}") from None


def _mass_grid(section, path="scan"):
    if not isinstance(section, dict):
        raise ConfigError(path, "expected a table")
    if "masses" in section:
        grid = np.asarray(_get(section, "masses", path, list), dtype=float)
    elif {"start", "stop", "n"} <= section.keys():
        grid = np.linspace(_get(section, "start", path, float), _get(section, "stop", path, float),
                           _get(section, "n", path, int))
    else:
        raise ConfigError(f"{path}.masses", "missing: give 'masses' or 'start'/'stop'/'n' "
                                            "(the scan range is never defaulted)")
    return grid


def build_model(config: dict) -> BumpHuntModel:
    """Materialise a :class:`BumpHuntModel` from a parsed configuration mapping."""
    if not isinstance(config, dict):
        raise ConfigError("<root>", "expected a table")
    hist = config.get("histogram")
    if hist is None:
        raise ConfigError("histogram", "missing")
    if "edges" in hist:
        edges = np.asarray(_get(hist, "edges", "histogram", list), dtype=float)
    else:
        low = _get(hist, "low", "histogram", float)
        high = _get(hist, "high", "histogram", float)
        n_bins = _get(hist, "n_bins", "histogram", int)
        if n_bins < 1 or not high > low:
            raise ConfigError("histogram", "need n_bins >= 1 and high > low")
        edges = np.linspace(low, high, n_bins + 1)
    if "background" not in config:
        raise ConfigError("background", "missing")
    background = background_from_shape(edges, config["background"])
    signal = config.get("signal")
    if signal is None:
        raise ConfigError("signal", "missing")
    scan = config.get("scan")
    if scan is None:
        raise ConfigError("scan", "missing")
    lumi = config.get("luminosity", 1.0)
    if isinstance(lumi, bool) or not isinstance(lumi, (int, float)) or not lumi > 0:
        raise ConfigError("luminosity", f"must be a number > 0, got {lumi!r}")
    try:
        return BumpHuntModel(
            bin_edges=edges,
            background_shape=background,
            signal_resolution=_get(signal, "resolution", "signal", float),
            mass_grid=_mass_grid(scan),
            luminosity_scale=float(lumi),
            window=float(signal.get("window", 2.0)),
            sideband_ratio=float(signal.get("sideband_ratio", 1.0)),
            local_method=str(scan.get("method", "profile")),
        )
    except InvalidInputError as exc:
        raise ConfigError("<model>", str(exc)) from exc
