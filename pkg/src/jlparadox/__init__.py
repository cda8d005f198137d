"""Frequentist and Bayesian significance for point-null tests.

Submodules: :mod:`~jlparadox.normal` (z/p arithmetic), :mod:`~jlparadox.likelihood`,
:mod:`~jlparadox.bayes` (Bayes factors under mixture priors),
:mod:`~jlparadox.reference` (intrinsic discrepancy) and
:mod:`~jlparadox.bumphunt` (binned resonance search with look-elsewhere correction).
"""

__version__ = "0.1.0"

from .normal import FrequentistResult, Measurement, Tails, p_from_z, z_from_p  # noqa: E402
