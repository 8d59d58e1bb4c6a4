"""Range and velocity estimation for NC-OFDM sensing over fragmented spectrum.

The pipeline works in the modulation-symbol domain: an occupancy mask marks
which subcarriers are usable on each symbol, the divided channel matrix is
masked accordingly, and every non-zero column (range) or row (velocity) is
reconstructed as a sparse spectrum with FISTA before non-coherent
accumulation and peak search. Masked and plain 2D-FFT baselines, K-fold
selection of the regularization weight and closed-form performance figures
are provided alongside.
"""

from ncisac.config import DurationMode, SimulationConfig, default_config, load_config
from ncisac.occupancy import OccupancyMask, scenario1_mask, scenario2_mask
from ncisac.channel import ChannelMatrix, TargetTruth, apply_mask, synthesize
from ncisac.fista import FistaConfig, solve
from ncisac.estimators import (
    EstimationReport,
    Method,
    estimate_plain_2dfft,
    estimate_range_jcmsa,
    estimate_range_masked2dfft,
    estimate_velocity_jcmsa,
    estimate_velocity_masked2dfft,
)

__all__ = [
    "ChannelMatrix",
    "DurationMode",
    "EstimationReport",
    "FistaConfig",
    "Method",
    "OccupancyMask",
    "SimulationConfig",
    "TargetTruth",
    "apply_mask",
    "default_config",
    "estimate_plain_2dfft",
    "estimate_range_jcmsa",
    "estimate_range_masked2dfft",
    "estimate_velocity_jcmsa",
    "estimate_velocity_masked2dfft",
    "load_config",
    "scenario1_mask",
    "scenario2_mask",
    "solve",
    "synthesize",
]
