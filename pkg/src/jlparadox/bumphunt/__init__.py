"""Binned resonance search: local and global significance of a bump."""

from .lee import GlobalResult, count_upcrossings, global_p_mc, global_p_upcrossing, trials_factor
from .local import ProfileResult, local_p_counting, local_p_profile, poisson_tail, profile_fit
from .model import BumpHuntModel, ObservedHistogram, build_model
from .scan import ScanResult, scan
from .toys import ToyEnsemble, generate_toy, run_toys, toy_rng

__all__ = [
    "BumpHuntModel",
    "ObservedHistogram",
    "build_model",
    "poisson_tail",
    "local_p_counting",
    "local_p_profile",
    "profile_fit",
    "ProfileResult",
    "ScanResult",
    "scan",
    "toy_rng",
    "generate_toy",
    "run_toys",
    "ToyEnsemble",
    "GlobalResult",
    "global_p_mc",
    "global_p_upcrossing",
    "count_upcrossings",
    "trials_factor",
]
