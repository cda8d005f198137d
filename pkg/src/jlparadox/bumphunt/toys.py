"""Pseudo-experiments with per-toy counter-based random streams.

Toy ``i`` of stream ``k`` under master seed ``s`` always draws from
``Philox`` keyed by ``SeedSequence(s, spawn_key=(k, i))``, so any toy can
be regenerated on its own and the ensemble does not depend on how work is
split between processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from .model import BumpHuntModel, ObservedHistogram
from .scan import scan_counts

__all__ = ["STREAM_NULL", "STREAM_CALIBRATION", "STREAM_OBSERVED", "toy_rng", "generate_toy",
           "ToyEnsemble", "run_toys"]

STREAM_NULL = 0
STREAM_CALIBRATION = 1
STREAM_OBSERVED = 2


def toy_rng(seed: int, index: int, stream: int = STREAM_NULL) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def generate_toy(model: BumpHuntModel, theta: float = 0.0, psi: float | None = None,
                 rng: np.random.Generator | None = None) -> ObservedHistogram:
    """Independent Poisson counts around background plus ``theta`` times the bump at ``psi``."""
    if theta < 0:
        raise InvalidInputError("theta must be >= 0")
    if rng is None:
        raise InvalidInputError("pass an explicit random stream (see toy_rng)")
    mu = model.expected(theta, psi)
    return ObservedHistogram(rng.poisson(mu))


@dataclass(frozen=True, eq=False)
class ToyEnsemble:
    """Scans of H0 toys: ``local_z`` and ``local_p`` have shape ``(n_toys, n_masses)``."""

    seed: int
    stream: int
    local_p: np.ndarray
    local_z: np.ndarray

    @property
    def n_toys(self) -> int:
        return self.local_p.shape[0]

    @property
    def p_min(self) -> np.ndarray:
        return self.local_p.min(axis=1)


def _scan_block(model, seed, stream, start, stop):
    n_mass = model.mass_grid.size
    p = np.empty((stop - start, n_mass))
    z = np.empty((stop - start, n_mass))
    expected = model.expected()
    for row, i in enumerate(range(start, stop)):
        counts = toy_rng(seed, i, stream).poisson(expected)
        p[row], z[row], _ = scan_counts(model, counts)
    return p, z


def run_toys(model: BumpHuntModel, n_toys: int, seed: int, stream: int = STREAM_NULL,
             workers: int = 1) -> ToyEnsemble:
    """Generate and scan ``n_toys`` background-only pseudo-experiments.

    With ``workers > 1`` contiguous blocks of toy indices go to a process
    pool and are reassembled in index order.
    """
    if n_toys < 1:
        raise InvalidInputError("n_toys must be >= 1")
    workers = max(1, int(workers or 1))
    if workers == 1:
        p, z = _scan_block(model, seed, stream, 0, n_toys)
    else:
        bounds = np.linspace(0, n_toys, min(workers * 4, n_toys) + 1).astype(int)
        blocks = list(zip(bounds[:-1], bounds[1:]))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_block, *zip(*[(model, seed, stream, a, b) for a, b in blocks])))
        p = np.concatenate([part[0] for part in parts])
        z = np.concatenate([part[1] for part in parts])
    return ToyEnsemble(seed=int(seed), stream=int(stream), local_p=p, local_z=z)
