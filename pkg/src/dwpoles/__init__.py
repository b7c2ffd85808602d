"""Resonances of a one-dimensional double square well.

Exact S-matrix, complex pole search, pole trajectories under parameter
sweeps, and the double pole separating resonant tunneling from level
repulsion.
"""
__version__ = "0.1.0"

from .kernels import BACKEND
from .potential import (DEFAULT_PARAMS, DoubleWellParams, PotentialSpec, Segment,
                        build_double_well, params_from_spec, segment_at)
from .scattering import (momentum, occupation, phase_shift, pole_function, propagate,
                         s_matrix, wavefunction)
from .poles import Pole, SearchRegion, find_poles, refine, winding_count
from .continuation import SweepSpec, Trajectory, classify_regimes, find_double_pole, track

__all__ = [
    "BACKEND", "DoubleWellParams", "DEFAULT_PARAMS", "Pole", "PotentialSpec", "SearchRegion",
    "Segment", "SweepSpec", "Trajectory", "build_double_well", "classify_regimes",
    "find_double_pole", "find_poles", "momentum", "occupation", "params_from_spec",
    "phase_shift", "pole_function", "propagate", "refine", "s_matrix", "segment_at", "track",
    "wavefunction", "winding_count",
]
