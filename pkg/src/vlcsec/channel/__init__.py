"""
LoS channel model: LED/photodiode parameters, orientation sampling and gains.
"""

from .models import (
    ReceiverId,
    lambertian_order,
    wrap_azimuth,
    LedParams,
    PdParams,
    Orientation,
    Receiver,
)
from .gain import (
    POLAR_MEAN,
    POLAR_STD,
    incidence_cos,
    concentrator_gain,
    channel_gain,
    sample_orientation,
    optimal_azimuth,
    estimated_channel_gain,
    gain_matrix,
    estimated_gain_matrix,
)

__all__ = [
    "ReceiverId",
    "lambertian_order",
    "wrap_azimuth",
    "LedParams",
    "PdParams",
    "Orientation",
    "Receiver",
    "POLAR_MEAN",
    "POLAR_STD",
    "incidence_cos",
    "concentrator_gain",
    "channel_gain",
    "sample_orientation",
    "optimal_azimuth",
    "estimated_channel_gain",
    "gain_matrix",
    "estimated_gain_matrix",
]
