"""TOML run configuration for a bump-hunt campaign.

Example::

    luminosity = 1.0

    [histogram]
    low = 0.0
    high = 200.0
    n_bins = 200

    [background]
    shape = "flat"          # flat | exponential | table
    per_bin = 100.0

    [signal]
    resolution = 0.5
    window = 2.0            # signal window half-width, in resolutions
    sideband_ratio = 1.0

    [scan]
    method = "profile"      # profile | counting
    start = 10.0
    stop = 190.0
    n = 20

    [data]
    source = "toy"          # toy | counts
    theta = 0.0

    [toys]
    n = 10000
    seed = 12345
    workers = 1

    [upcrossing]
    reference_z = 1.0
    n_calibration = 1000

    [thresholds]
    alpha_z = 5.0
"""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError
from .model import BumpHuntModel, ObservedHistogram, _get, build_model

__all__ = ["RunConfig", "parse_config", "load_config", "config_hash"]


@dataclass(frozen=True, eq=False)
class RunConfig:
    model: BumpHuntModel
    raw: dict
    text: str
    data_source: str
    observed: ObservedHistogram | None
    inject_theta: float
    inject_psi: float | None
    n_toys: int
    seed: int | None
    workers: int
    reference_z: float
    target_z: float | None
    n_calibration: int
    alpha_z: float

    @property
    def hash(self) -> str:
        return config_hash(self.text)


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _opt(mapping, key, path, kind, default):
    return _get(mapping, key, path, kind) if key in mapping else default


def parse_config(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<toml>", str(exc)) from None
    model = build_model(raw)

    data = raw.get("data", {"source": "toy"})
    source = _opt(data, "source", "data", str, "toy")
    observed, theta, psi = None, 0.0, None
    if source == "counts":
        counts = _get(data, "counts", "data", list)
        if len(counts) != model.n_bins:
            raise ConfigError("data.counts", f"expected {model.n_bins} entries, got {len(counts)}")
        try:
            observed = ObservedHistogram(counts)
        except ValueError as exc:
            raise ConfigError("data.counts", str(exc)) from None
    elif source == "toy":
        theta = _opt(data, "theta", "data", float, 0.0)
        if theta < 0:
            raise ConfigError("data.theta", "must be >= 0")
        psi = _opt(data, "psi", "data", float, None)
        if theta > 0 and psi is None:
            raise ConfigError("data.psi", "required when data.theta > 0")
    else:
        raise ConfigError("data.source", f"unknown source {source!r} (toy | counts)")

    toys = raw.get("toys", {})
    n_toys = _opt(toys, "n", "toys", int, 1000)
    if n_toys < 100:
        raise ConfigError("toys.n", "must be >= 100")
    seed = _opt(toys, "seed", "toys", int, None)
    workers = _opt(toys, "workers", "toys", int, 1)
    if workers < 1:
        raise ConfigError("toys.workers", "must be >= 1")

    up = raw.get("upcrossing", {})
    reference_z = _opt(up, "reference_z", "upcrossing", float, 1.0)
    if reference_z > 2.0:
        raise ConfigError("upcrossing.reference_z", "must be <= 2")
    target_z = _opt(up, "target_z", "upcrossing", float, None)
    n_cal = _opt(up, "n_calibration", "upcrossing", int, 1000)
    if n_cal < 2:
        raise ConfigError("upcrossing.n_calibration", "must be >= 2")

    thresholds = raw.get("thresholds", {})
    alpha_z = _opt(thresholds, "alpha_z", "thresholds", float, 5.0)

    return RunConfig(model=model, raw=raw, text=text, data_source=source, observed=observed,
                     inject_theta=theta, inject_psi=psi, n_toys=n_toys, seed=seed, workers=workers,
                     reference_z=reference_z, target_z=target_z, n_calibration=n_cal, alpha_z=alpha_z)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
