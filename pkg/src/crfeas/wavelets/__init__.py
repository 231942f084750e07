"""Wavelet filter design posed as a feasibility problem on sampled filter matrices."""

from .constraints import WaveletProblem
from .ensemble import dft, half_shift, inverse_dft, polar, random_consistent_ensemble
from .filters import DB3, FilterPair, cascade_samples, extract_filters

__all__ = [
    "DB3",
    "FilterPair",
    "WaveletProblem",
    "cascade_samples",
    "dft",
    "extract_filters",
    "half_shift",
    "inverse_dft",
    "polar",
    "random_consistent_ensemble",
]
